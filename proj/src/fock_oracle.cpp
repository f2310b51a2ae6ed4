#include "omw/fock_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

namespace omw::oracle {

namespace {

constexpr double kTailLimit = 1e-10;      // top-two-level population bound
constexpr double kCoherentTail = 1e-12;   // Poisson tail bound for displaced-vacuum overlaps
constexpr long kMaxBlockEntries = 30'000'000;  // ~480 MB of complex doubles
constexpr int kMaxDenseDim = 4096;

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Geometric (thermal) weights over the truncation, renormalized. top_two
// reports the untruncated population of levels cutoff-2 and cutoff-1.
std::vector<double> thermal_weights(double n0, int cutoff, double* top_two) {
    std::vector<double> w(cutoff, 0.0);
    if (n0 <= 0.0) {
        w[0] = 1.0;
        if (top_two) *top_two = 0.0;
        return w;
    }
    const double q = n0 / (1.0 + n0);
    double sum = 0.0;
    for (int n = 0; n < cutoff; ++n) {
        w[n] = std::pow(q, n) / (1.0 + n0);
        sum += w[n];
    }
    if (top_two) *top_two = w[cutoff - 2] + w[cutoff - 1];
    for (double& v : w) v /= sum;
    return w;
}

// Kraus amplitudes of a pure-loss channel: keep n-j of n photons,
// c_j(n) = sqrt(binom(n,j) t^(n-j) (1-t)^j) e^{i phase (n-j)}.
Eigen::MatrixXcd loss_coefficients(int levels, double t, double phase) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(levels, levels);  // (j, n)
    for (int n = 0; n < levels; ++n) {
        for (int j = 0; j <= n; ++j) {
            double mag;
            if (t == 0.0) {
                mag = (j == n) ? 1.0 : 0.0;
            } else if (t == 1.0) {
                mag = (j == 0) ? 1.0 : 0.0;
            } else {
                const double log_binom = log_factorial(n) - log_factorial(j) - log_factorial(n - j);
                mag = std::exp(0.5 * (log_binom + (n - j) * std::log(t) + j * std::log(1.0 - t)));
            }
            if (mag != 0.0) c(j, n) = std::polar(mag, phase * (n - j));
        }
    }
    return c;
}

Eigen::VectorXcd coherent_amplitudes(complexd x, int cutoff) {
    Eigen::VectorXcd c(cutoff);
    c(0) = std::exp(-0.5 * std::norm(x));
    for (int m = 1; m < cutoff; ++m) c(m) = c(m - 1) * x / std::sqrt(static_cast<double>(m));
    return c;
}

// Upper bound on the Poisson(lambda) tail mass at levels >= n.
double poisson_tail_bound(double lambda, int n) {
    if (lambda <= 0.0) return 0.0;
    if (n <= lambda) return 1.0;
    const double log_pmf = -lambda + n * std::log(lambda) - log_factorial(n);
    return std::exp(log_pmf) * (n + 1.0) / (n + 1.0 - lambda);
}

void require_coherent_support(int cutoff, double xnorm2, const char* which) {
    if (poisson_tail_bound(xnorm2, cutoff) >= kCoherentTail) {
        std::ostringstream os;
        os << "displacement on mode " << which << " with |x|^2 = " << xnorm2
           << " exceeds the truncation guarantee at cutoff " << cutoff;
        throw UnderTruncationError(os.str());
    }
}

int start_cutoff(double mean) {
    const double m = std::max(mean, 0.0);
    return std::max(20, static_cast<int>(std::ceil(m + 6.0 * std::sqrt(m) + 10.0)));
}

// cutoff from which displaced-vacuum overlaps at |x|^2 = xnorm2 are safe,
// with an order of magnitude to spare against the acceptance threshold
int coherent_floor(double xnorm2) {
    int n = start_cutoff(xnorm2);
    while (poisson_tail_bound(xnorm2, n) >= 0.1 * kCoherentTail) ++n;
    return n;
}

// First column of exp(r (e^{i phase} a^dag b^dag - h.c.)) restricted to the
// invariant block spanned by |m, m+k>, m = 0..len-1. Anti-Hermitian
// generator, exponentiated through the Hermitian eigendecomposition of iG.
Eigen::VectorXcd tms_block_column(double r, double phase, int k, int len) {
    Eigen::VectorXcd col = Eigen::VectorXcd::Zero(len);
    if (r == 0.0 || len == 1) {
        col(0) = 1.0;
        return col;
    }
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(len, len);
    const complexd up = complexd(0.0, 1.0) * std::polar(r, phase);
    for (int m = 0; m + 1 < len; ++m) {
        const double g = std::sqrt(static_cast<double>(m + 1) * static_cast<double>(m + 1 + k));
        h(m + 1, m) = up * g;
        h(m, m + 1) = std::conj(up) * g;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    // U e0 = V diag(e^{-i lambda}) V^dag e0
    Eigen::VectorXcd w = es.eigenvectors().row(0).adjoint();
    for (int i = 0; i < len; ++i)
        w(i) *= std::exp(complexd(0.0, -es.eigenvalues()(i)));
    col = es.eigenvectors() * w;
    const double defect = std::abs(col.norm() - 1.0);
    if (defect > 1e-10)
        throw NumericalError("two-mode squeeze block exponential lost unitarity: defect " +
                             std::to_string(defect));
    return col;
}

// Density operator with [rho, n1 - n2] = 0, stored one block per difference
// d = m - n. Block d holds rho[(m, m-d), (m', m'-d)] for m in [lo(d), hi(d)).
struct BlockState {
    int dim1 = 0, dim2 = 0;
    std::vector<Eigen::MatrixXcd> blocks;

    BlockState(int d1, int d2) : dim1(d1), dim2(d2), blocks(d1 + d2 - 1) {
        long total = 0;
        for (int d = -(dim2 - 1); d <= dim1 - 1; ++d) {
            const int len = hi(d) - lo(d);
            total += static_cast<long>(len) * len;
        }
        if (total > kMaxBlockEntries)
            throw UnderTruncationError("protocol state at cutoffs (" + std::to_string(d1) + ", " +
                                       std::to_string(d2) + ") exceeds the memory budget");
        for (int d = -(dim2 - 1); d <= dim1 - 1; ++d) {
            const int len = hi(d) - lo(d);
            block(d) = Eigen::MatrixXcd::Zero(len, len);
        }
    }

    int lo(int d) const { return std::max(d, 0); }
    int hi(int d) const { return std::min(dim1, dim2 + d); }
    Eigen::MatrixXcd& block(int d) { return blocks[d + dim2 - 1]; }
    const Eigen::MatrixXcd& block(int d) const { return blocks[d + dim2 - 1]; }

    std::pair<Eigen::VectorXd, Eigen::VectorXd> marginals() const {
        Eigen::VectorXd m1 = Eigen::VectorXd::Zero(dim1);
        Eigen::VectorXd m2 = Eigen::VectorXd::Zero(dim2);
        for (int d = -(dim2 - 1); d <= dim1 - 1; ++d) {
            const auto& b = block(d);
            for (int m = lo(d); m < hi(d); ++m) {
                const double pop = b(m - lo(d), m - lo(d)).real();
                m1(m) += pop;
                m2(m - d) += pop;
            }
        }
        return {m1, m2};
    }

    // <x, y| rho |x, y>
    double coherent_overlap(complexd x, complexd y) const {
        const Eigen::VectorXcd cx = coherent_amplitudes(x, dim1);
        const Eigen::VectorXcd cy = coherent_amplitudes(y, dim2);
        complexd acc = 0.0;
        for (int d = -(dim2 - 1); d <= dim1 - 1; ++d) {
            const int len = hi(d) - lo(d);
            Eigen::VectorXcd w(len);
            for (int i = 0; i < len; ++i) {
                const int m = lo(d) + i;
                w(i) = cx(m) * cy(m - d);
            }
            acc += w.dot(block(d) * w);
        }
        return acc.real();
    }

    Eigen::MatrixXcd densify() const {
        const int dim = dim1 * dim2;
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
        for (int d = -(dim2 - 1); d <= dim1 - 1; ++d) {
            const auto& b = block(d);
            for (int m = lo(d); m < hi(d); ++m)
                for (int mp = lo(d); mp < hi(d); ++mp)
                    rho(m * dim2 + (m - d), mp * dim2 + (mp - d)) = b(m - lo(d), mp - lo(d));
        }
        return rho;
    }
};

// Loss channel on mode 2: Kraus j shifts d -> d + j and leaves m untouched.
BlockState block_loss_mode2(const BlockState& src, double t, double phase) {
    BlockState out(src.dim1, src.dim2);
    const Eigen::MatrixXcd c = loss_coefficients(src.dim2, t, phase);
    for (int d = -(src.dim2 - 1); d <= src.dim1 - 1; ++d) {
        const auto& b = src.block(d);
        if (b.size() == 0) continue;
        for (int j = 0; j < src.dim2; ++j) {
            const int dp = d + j;
            if (dp > src.dim1 - 1) break;
            const int lo = out.lo(dp);  // = max(src.lo(d), dp)
            const int hi = src.hi(d);
            if (hi <= lo) continue;
            const int len = hi - lo;
            Eigen::VectorXcd v(len);
            bool nonzero = false;
            for (int i = 0; i < len; ++i) {
                v(i) = c(j, lo + i - d);
                nonzero = nonzero || v(i) != complexd(0.0);
            }
            if (!nonzero) continue;
            out.block(dp).block(lo - out.lo(dp), lo - out.lo(dp), len, len) +=
                (v * v.adjoint())
                    .cwiseProduct(b.block(lo - src.lo(d), lo - src.lo(d), len, len));
        }
    }
    return out;
}

// Loss channel on mode 1: Kraus i shifts d -> d - i and the row m -> m - i.
BlockState block_loss_mode1(const BlockState& src, double t, double phase) {
    BlockState out(src.dim1, src.dim2);
    const Eigen::MatrixXcd c = loss_coefficients(src.dim1, t, phase);
    for (int d = -(src.dim2 - 1); d <= src.dim1 - 1; ++d) {
        const auto& b = src.block(d);
        if (b.size() == 0) continue;
        for (int i = 0; i < src.dim1; ++i) {
            const int dp = d - i;
            if (dp < -(src.dim2 - 1)) break;
            const int lo = std::max(src.lo(d), i);
            const int hi = src.hi(d);
            if (hi <= lo) continue;
            const int len = hi - lo;
            Eigen::VectorXcd v(len);
            bool nonzero = false;
            for (int i2 = 0; i2 < len; ++i2) {
                v(i2) = c(i, lo + i2);
                nonzero = nonzero || v(i2) != complexd(0.0);
            }
            if (!nonzero) continue;
            out.block(dp).block(lo - i - out.lo(dp), lo - i - out.lo(dp), len, len) +=
                (v * v.adjoint())
                    .cwiseProduct(b.block(lo - src.lo(d), lo - src.lo(d), len, len));
        }
    }
    return out;
}

struct ProtocolBuild {
    BlockState state;
    int cutoff1, cutoff2;
};

std::string point_label(const SystemParams& p) {
    std::ostringstream os;
    os << "(p=" << p.p << ", T=" << p.T << ", eta=" << p.eta << ", n0=" << p.n0 << ")";
    return os.str();
}

// Build the protocol state in block form. floor1/floor2 raise the mode
// cutoffs so that later displaced-vacuum overlaps stay inside the basis.
ProtocolBuild build_protocol(const SystemParams& params, int cutoff_override, int floor1,
                             int floor2) {
    params.validate();
    const double p = params.p;
    const double r = std::asinh(std::sqrt(p / (1.0 - p)));
    const double mean_a1 = (1.0 + params.n0) * p / (1.0 - p);
    const double mean_b = (params.n0 + p) / (1.0 - p);
    const double half_pi = std::numbers::pi / 2.0;

    int m1, m2;
    if (cutoff_override > 0) {
        if (cutoff_override < 3)
            throw std::invalid_argument("simulate_protocol: cutoff must be at least 3");
        m1 = m2 = cutoff_override;
    } else {
        m1 = std::max(start_cutoff(mean_a1), floor1);
        m2 = std::max(start_cutoff(std::max(params.n0, mean_b)), floor2);
    }

    for (int attempt = 0;; ++attempt) {
        double thermal_top2 = 0.0;
        const std::vector<double> w = thermal_weights(params.n0, m2, &thermal_top2);

        bool grow1 = false, grow2 = thermal_top2 >= kTailLimit;
        BlockState state(m1, m2);
        if (!grow2) {
            double skipped = 0.0;
            for (int k = 0; k < m2; ++k) {
                if (w[k] < 1e-16) {
                    skipped += w[k];
                    continue;
                }
                const int len = std::min(m1, m2 - k);
                const Eigen::VectorXcd col = tms_block_column(r, half_pi, k, len);
                state.block(-k).noalias() += w[k] * (col * col.adjoint());
            }
            if (skipped > 1e-13)
                throw NumericalError("protocol build dropped thermal weight " +
                                     std::to_string(skipped));
            const auto [marg1, marg2] = state.marginals();
            grow1 = marg1(m1 - 1) + marg1(m1 - 2) >= kTailLimit;
            grow2 = marg2(m2 - 1) + marg2(m2 - 2) >= kTailLimit;
        }

        if (grow1 || grow2) {
            if (cutoff_override > 0)
                throw UnderTruncationError("protocol state under-truncated at fixed cutoff " +
                                           std::to_string(cutoff_override) + " for params " +
                                           point_label(params));
            if (attempt >= 8)
                throw UnderTruncationError("adaptive cutoff did not converge for params " +
                                           point_label(params));
            if (grow1) m1 *= 2;
            if (grow2) m2 *= 2;
            continue;
        }

        // phonon -> A2 conversion, then detection loss on both optical modes
        state = block_loss_mode2(state, params.T, half_pi);
        state = block_loss_mode1(state, params.eta, 0.0);
        state = block_loss_mode2(state, params.eta, 0.0);

        const auto [marg1, marg2] = state.marginals();
        const double trace = marg1.sum();
        if (std::abs(trace - 1.0) > 1e-10)
            throw NumericalError("protocol state trace drifted to " + std::to_string(trace) +
                                 " at params " + point_label(params));
        return ProtocolBuild{std::move(state), m1, m2};
    }
}

Eigen::MatrixXcd swap_modes(const Eigen::MatrixXcd& rho, int c1, int c2) {
    const int dim = c1 * c2;
    Eigen::MatrixXcd out(dim, dim);
    for (int m = 0; m < c1; ++m)
        for (int n = 0; n < c2; ++n)
            for (int mp = 0; mp < c1; ++mp)
                for (int np = 0; np < c2; ++np)
                    out(n * c1 + m, np * c1 + mp) = rho(m * c2 + n, mp * c2 + np);
    return out;
}

Eigen::MatrixXcd dense_loss_mode0(const Eigen::MatrixXcd& rho, int c1, int c2, double t,
                                  double phase) {
    const Eigen::MatrixXcd c = loss_coefficients(c1, t, phase);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (int i = 0; i < c1; ++i)
        for (int m = i; m < c1; ++m) {
            if (c(i, m) == complexd(0.0)) continue;
            for (int mp = i; mp < c1; ++mp) {
                const complexd w = c(i, m) * std::conj(c(i, mp));
                if (w == complexd(0.0)) continue;
                out.block((m - i) * c2, (mp - i) * c2, c2, c2) +=
                    w * rho.block(m * c2, mp * c2, c2, c2);
            }
        }
    return out;
}

}  // namespace

double TruncatedOperator::unitarity_defect() const {
    const Eigen::MatrixXcd g = entries.adjoint() * entries -
                               Eigen::MatrixXcd::Identity(entries.rows(), entries.cols());
    return g.cwiseAbs().maxCoeff();
}

double TwoModeState::trace_defect() const {
    const complexd tr = rho.trace();
    return std::abs(tr.real() - 1.0) + std::abs(tr.imag());
}

double TwoModeState::hermiticity_defect() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double TwoModeState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((rho + rho.adjoint()) / 2.0,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::VectorXd TwoModeState::marginal_diag(int mode) const {
    if (mode != 0 && mode != 1) throw std::invalid_argument("marginal_diag: mode must be 0 or 1");
    const int levels = mode == 0 ? cutoff1 : cutoff2;
    Eigen::VectorXd marg = Eigen::VectorXd::Zero(levels);
    for (int m = 0; m < cutoff1; ++m)
        for (int n = 0; n < cutoff2; ++n)
            marg(mode == 0 ? m : n) += rho(m * cutoff2 + n, m * cutoff2 + n).real();
    return marg;
}

double TwoModeState::mode_tail_top2(int mode) const {
    const Eigen::VectorXd marg = marginal_diag(mode);
    const int levels = static_cast<int>(marg.size());
    return marg(levels - 1) + (levels >= 2 ? marg(levels - 2) : 0.0);
}

void TwoModeState::validate(bool with_spectrum) const {
    if (cutoff1 < 1 || cutoff2 < 1 || rho.rows() != dim() || rho.cols() != dim())
        throw std::invalid_argument("TwoModeState: inconsistent dimensions");
    if (hermiticity_defect() > 1e-12)
        throw NumericalError("TwoModeState: not Hermitian, defect " +
                             std::to_string(hermiticity_defect()));
    if (trace_defect() > 1e-10)
        throw NumericalError("TwoModeState: trace defect " + std::to_string(trace_defect()));
    for (int mode : {0, 1})
        if (mode_tail_top2(mode) >= kTailLimit)
            throw UnderTruncationError("TwoModeState: mode " + std::to_string(mode) +
                                       " top-level population " +
                                       std::to_string(mode_tail_top2(mode)));
    if (with_spectrum && min_eigenvalue() < -1e-9)
        throw NumericalError("TwoModeState: negative eigenvalue " +
                             std::to_string(min_eigenvalue()));
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> ladder_ops(int cutoff) {
    if (cutoff < 2) throw std::invalid_argument("ladder_ops: cutoff must be at least 2");
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {a, a.adjoint()};
}

Eigen::MatrixXcd thermal_state(double n0, int cutoff) {
    if (n0 < 0.0 || !std::isfinite(n0)) throw std::invalid_argument("thermal_state: n0 must be >= 0");
    if (cutoff < 3) throw std::invalid_argument("thermal_state: cutoff must be at least 3");
    double top_two = 0.0;
    const std::vector<double> w = thermal_weights(n0, cutoff, &top_two);
    if (top_two >= kTailLimit)
        throw UnderTruncationError("thermal_state: n0 = " + std::to_string(n0) +
                                   " under-truncated at cutoff " + std::to_string(cutoff));
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (int n = 0; n < cutoff; ++n) rho(n, n) = w[n];
    return rho;
}

TruncatedOperator displacement_op(complexd alpha, int cutoff) {
    const double a = std::abs(alpha);
    if (cutoff <= a * a + 6.0 * a + 10.0)
        throw UnderTruncationError("displacement_op: cutoff " + std::to_string(cutoff) +
                                   " too small for |alpha| = " + std::to_string(a));
    // exp(alpha a^dag - alpha^* a) = exp(-iH) with Hermitian H = i(alpha a^dag - h.c.)
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (int n = 0; n + 1 < cutoff; ++n) {
        const complexd v = complexd(0.0, 1.0) * alpha * std::sqrt(static_cast<double>(n + 1));
        h(n + 1, n) = v;
        h(n, n + 1) = std::conj(v);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(cutoff);
    for (int i = 0; i < cutoff; ++i) phases(i) = std::exp(complexd(0.0, -es.eigenvalues()(i)));
    TruncatedOperator op{{cutoff},
                         es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint()};
    if (op.unitarity_defect() > 1e-10)
        throw NumericalError("displacement_op: unitarity defect " +
                             std::to_string(op.unitarity_defect()));
    return op;
}

TruncatedOperator two_mode_squeeze_op(double r, double phase, int cutoff1, int cutoff2) {
    if (r < 0.0) throw std::invalid_argument("two_mode_squeeze_op: r must be >= 0");
    if (cutoff1 < 2 || cutoff2 < 2)
        throw std::invalid_argument("two_mode_squeeze_op: cutoffs must be at least 2");
    const double lam2 = std::tanh(r) * std::tanh(r);
    const int nmin = std::min(cutoff1, cutoff2);
    const double top_two =
        (1.0 - lam2) * (std::pow(lam2, nmin - 2) + std::pow(lam2, nmin - 1));
    if (r > 0.0 && top_two >= kTailLimit)
        throw UnderTruncationError("two_mode_squeeze_op: pair distribution under-truncated at (" +
                                   std::to_string(cutoff1) + ", " + std::to_string(cutoff2) + ")");

    const int dim = cutoff1 * cutoff2;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    const complexd up = complexd(0.0, 1.0) * std::polar(r, phase);
    for (int d = -(cutoff2 - 1); d <= cutoff1 - 1; ++d) {
        const int lo = std::max(d, 0);
        const int hi = std::min(cutoff1, cutoff2 + d);
        const int len = hi - lo;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(len, len);
        for (int i = 0; i + 1 < len; ++i) {
            const int m = lo + i;
            const double g =
                std::sqrt(static_cast<double>(m + 1) * static_cast<double>(m - d + 1));
            h(i + 1, i) = up * g;
            h(i, i + 1) = std::conj(up) * g;
        }
        Eigen::MatrixXcd ub;
        if (len == 1 || r == 0.0) {
            ub = Eigen::MatrixXcd::Identity(len, len);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
            Eigen::VectorXcd phases(len);
            for (int i = 0; i < len; ++i)
                phases(i) = std::exp(complexd(0.0, -es.eigenvalues()(i)));
            ub = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        }
        // the blocks are the whole operator, so checking each one checks U
        const double defect =
            (ub.adjoint() * ub - Eigen::MatrixXcd::Identity(len, len)).cwiseAbs().maxCoeff();
        if (defect > 1e-10)
            throw NumericalError("two_mode_squeeze_op: unitarity defect " +
                                 std::to_string(defect));
        for (int i = 0; i < len; ++i)
            for (int j = 0; j < len; ++j)
                u((lo + i) * cutoff2 + (lo + i - d), (lo + j) * cutoff2 + (lo + j - d)) = ub(i, j);
    }
    return TruncatedOperator{{cutoff1, cutoff2}, std::move(u)};
}

TwoModeState loss_channel(const TwoModeState& state, int mode, double transmissivity,
                          double phase) {
    if (mode != 0 && mode != 1) throw std::invalid_argument("loss_channel: mode must be 0 or 1");
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
        throw std::invalid_argument("loss_channel: transmissivity must lie in [0,1]");
    TwoModeState out = state;
    if (mode == 0) {
        out.rho = dense_loss_mode0(state.rho, state.cutoff1, state.cutoff2, transmissivity, phase);
    } else {
        Eigen::MatrixXcd swapped = swap_modes(state.rho, state.cutoff1, state.cutoff2);
        swapped = dense_loss_mode0(swapped, state.cutoff2, state.cutoff1, transmissivity, phase);
        out.rho = swap_modes(swapped, state.cutoff2, state.cutoff1);
    }
    return out;
}

TwoModeState simulate_protocol(const SystemParams& params, int cutoff) {
    ProtocolBuild build = build_protocol(params, cutoff, 0, 0);

    // trim to the smallest truncation that still satisfies the tail bound
    int n1 = build.cutoff1, n2 = build.cutoff2;
    if (cutoff == 0) {
        const auto [marg1, marg2] = build.state.marginals();
        auto trim = [](const Eigen::VectorXd& marg, int full) {
            double tail = 0.0;
            int n = full;
            for (int level = full - 1; level >= 20; --level) {
                // tail from level-1 up must stay below the bound to cut at level+1
                tail += marg(level);
                if (tail + (level >= 1 ? marg(level - 1) : 0.0) >= kTailLimit) break;
                n = level + 1;
            }
            return n;
        };
        n1 = trim(marg1, build.cutoff1);
        n2 = trim(marg2, build.cutoff2);
    }
    if (static_cast<long>(n1) * n2 > kMaxDenseDim)
        throw UnderTruncationError(
            "simulate_protocol: dense state of dimension " + std::to_string(n1 * n2) +
            " exceeds the materialization limit; use probability_set for this regime");

    TwoModeState state;
    state.cutoff1 = n1;
    state.cutoff2 = n2;
    state.rho = Eigen::MatrixXcd::Zero(n1 * n2, n1 * n2);
    for (int d = -(n2 - 1); d <= n1 - 1; ++d) {
        const auto& b = build.state.block(d);
        const int lo_src = build.state.lo(d);
        const int lo = std::max(d, 0);
        const int hi = std::min({n1, n2 + d, build.state.hi(d)});
        for (int m = lo; m < hi; ++m)
            for (int mp = lo; mp < hi; ++mp)
                state.rho(m * n2 + (m - d), mp * n2 + (mp - d)) = b(m - lo_src, mp - lo_src);
    }
    return state;
}

ClickProbs click_probabilities(const TwoModeState& state, complexd alpha, complexd beta,
                               double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("click_probabilities: eta must lie in (0,1]");
    const double se = std::sqrt(eta);
    const complexd x = -se * alpha;
    const complexd y = -se * beta;
    require_coherent_support(state.cutoff1, std::norm(x), "A1");
    require_coherent_support(state.cutoff2, std::norm(y), "A2");

    const Eigen::VectorXcd cx = coherent_amplitudes(x, state.cutoff1);
    const Eigen::VectorXcd cy = coherent_amplitudes(y, state.cutoff2);
    const int c1 = state.cutoff1, c2 = state.cutoff2;

    Eigen::VectorXcd v(c1 * c2);
    for (int m = 0; m < c1; ++m)
        for (int n = 0; n < c2; ++n) v(m * c2 + n) = cx(m) * cy(n);
    const double p_joint = v.dot(state.rho * v).real();

    double p_a = 0.0;
    for (int n = 0; n < c2; ++n) {
        complexd acc = 0.0;
        for (int m = 0; m < c1; ++m)
            for (int mp = 0; mp < c1; ++mp)
                acc += std::conj(cx(m)) * state.rho(m * c2 + n, mp * c2 + n) * cx(mp);
        p_a += acc.real();
    }
    double p_b = 0.0;
    for (int m = 0; m < c1; ++m) {
        complexd acc = 0.0;
        for (int n = 0; n < c2; ++n)
            for (int np = 0; np < c2; ++np)
                acc += std::conj(cy(n)) * state.rho(m * c2 + n, m * c2 + np) * cy(np);
        p_b += acc.real();
    }
    return ClickProbs{p_a, p_b, p_joint};
}

double coincidence_probability(const TwoModeState& state, int mode) {
    const Eigen::VectorXd marg = state.marginal_diag(mode);  // validates the mode index
    double no_click_one_port = 0.0;
    double scale = 1.0;
    for (int n = 0; n < marg.size(); ++n) {
        no_click_one_port += marg(n) * scale;
        scale *= 0.5;
    }
    const double pc = 1.0 - 2.0 * no_click_one_port + marg(0);
    return pc < 0.0 && pc > -1e-12 ? 0.0 : pc;
}

TwoModeState phase_rotate(const TwoModeState& state, double phi) {
    TwoModeState out = state;
    const int c1 = state.cutoff1, c2 = state.cutoff2;
    Eigen::VectorXcd u(c1 * c2);
    for (int m = 0; m < c1; ++m)
        for (int n = 0; n < c2; ++n) u(m * c2 + n) = std::exp(complexd(0.0, phi * (m - n)));
    out.rho = u.asDiagonal() * state.rho * u.conjugate().asDiagonal();
    return out;
}

TwoModeState phase_average(const TwoModeState& state) {
    TwoModeState out = state;
    const int c1 = state.cutoff1, c2 = state.cutoff2;
    for (int m = 0; m < c1; ++m)
        for (int n = 0; n < c2; ++n)
            for (int mp = 0; mp < c1; ++mp)
                for (int np = 0; np < c2; ++np)
                    if (m - n != mp - np) out.rho(m * c2 + n, mp * c2 + np) = 0.0;
    return out;
}

ClickProbabilitySet probability_set(const SystemParams& params, complexd alpha, complexd beta,
                                    int cutoff) {
    const double se = std::sqrt(params.eta);
    const complexd x = -se * alpha;
    const complexd y = -se * beta;
    const int floor1 = cutoff > 0 ? 0 : coherent_floor(std::norm(x));
    const int floor2 = cutoff > 0 ? 0 : coherent_floor(std::norm(y));
    const ProtocolBuild build = build_protocol(params, cutoff, floor1, floor2);
    require_coherent_support(build.cutoff1, std::norm(x), "A1");
    require_coherent_support(build.cutoff2, std::norm(y), "A2");

    const auto [marg1, marg2] = build.state.marginals();

    ClickProbabilitySet set;
    const JointOutcomes j =
        joints_from_singles(marg1(0), marg2(0), build.state.block(0)(0, 0).real());
    set.p_pp = j.pp;
    set.p_pm = j.pm;
    set.p_mp = j.mp;
    set.p_mm = j.mm;

    auto coincidence = [](const Eigen::VectorXd& marg) {
        double no_click = 0.0;
        double scale = 1.0;
        for (int n = 0; n < marg.size(); ++n) {
            no_click += marg(n) * scale;
            scale *= 0.5;
        }
        const double pc = 1.0 - 2.0 * no_click + marg(0);
        return pc < 0.0 && pc > -1e-12 ? 0.0 : pc;
    };
    set.pc_a1 = coincidence(marg1);
    set.pc_a2 = coincidence(marg2);

    // reduced states of a block-diagonal rho are diagonal, so the displaced
    // singles are Poisson-weighted marginals
    const Eigen::VectorXcd cx = coherent_amplitudes(x, build.cutoff1);
    const Eigen::VectorXcd cy = coherent_amplitudes(y, build.cutoff2);
    set.q_singles_a = (cx.cwiseAbs2().cwiseProduct(marg1)).sum();
    set.q_singles_b = (cy.cwiseAbs2().cwiseProduct(marg2)).sum();
    set.q_joint = build.state.coherent_overlap(x, y);
    set.validate();
    return set;
}

}  // namespace omw::oracle
