#include "dtek/omp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dtek {

Dictionary build_dictionary(int n, int p, DictionaryKind kind)
{
    if (n < 1)
        throw DimensionError("dictionary row count must be positive");
    if (p < 2)
        throw ConfigError("dictionary needs at least 2 grid points");
    Dictionary d;
    d.kind = kind;
    d.atoms.resize(n, p);
    d.grid.resize(p);
    for (int k = 0; k < p; ++k) {
        d.grid[k] = static_cast<double>(k) / p;
        // Reduce r*k mod P so the phase is exact for large indices.
        for (int r = 0; r < n; ++r) {
            const long long m = (static_cast<long long>(r) * k) % p;
            d.atoms(r, k) = phasor(-kTwoPi * static_cast<double>(m) / p);
        }
    }
    return d;
}

void StopRule::validate() const
{
    switch (kind) {
    case Kind::KnownSparsity:
    case Kind::MaxIters:
        if (!(value >= 1.0) || value != std::floor(value))
            throw ConfigError("OMP sparsity / iteration count must be an integer >= 1");
        break;
    case Kind::ResidualRatio:
        if (!(value > 0.0 && value < 1.0))
            throw ConfigError("OMP residual ratio must lie in (0, 1)");
        break;
    }
}

std::size_t omp1d_dictionary_bytes(int rows, int cols, int p_theta, int p_tau)
{
    return static_cast<std::size_t>(rows) * cols * p_theta * p_tau * sizeof(Complex);
}

namespace {

constexpr double kMaxGramCondition = 1e12;

std::size_t iteration_limit(const StopRule& stop, std::size_t observations, std::size_t atoms)
{
    std::size_t limit = std::min(observations, atoms);
    if (stop.kind != StopRule::Kind::ResidualRatio)
        limit = std::min(limit, static_cast<std::size_t>(stop.value));
    return limit;
}

bool residual_small_enough(const StopRule& stop, double residual, double initial)
{
    return stop.kind == StopRule::Kind::ResidualRatio && residual <= stop.value * initial;
}

CVector solve_gram(const CMatrix& gram, const CVector& rhs)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxGramCondition)
        throw SingularGramError("selected atoms are numerically dependent (condition number " +
                                std::to_string(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) +
                                "); refine or de-duplicate the dictionary grid");
    return gram.llt().solve(rhs);
}

void check_dictionaries(const ChannelMatrix& channel, const Dictionary& angle, const Dictionary& delay)
{
    if (angle.rows() != channel.rows() || delay.rows() != channel.cols())
        throw DimensionError("dictionary rows (" + std::to_string(angle.rows()) + ", " +
                             std::to_string(delay.rows()) + ") do not match channel " +
                             std::to_string(channel.rows()) + "x" + std::to_string(channel.cols()));
}

} // namespace

SparseSupport omp2d(const ChannelMatrix& channel, const Dictionary& angle, const Dictionary& delay,
                    const StopRule& stop)
{
    stop.validate();
    check_dictionaries(channel, angle, delay);

    const CMatrix& A = angle.atoms;
    const CMatrix& B = delay.atoms;
    const int p_theta = angle.size();
    const int p_tau = delay.size();
    const CMatrix a_adj = A.adjoint();
    const CMatrix b_conj = B.conjugate();
    const RVector a_norm = A.colwise().norm().transpose();
    const RVector b_norm = B.colwise().norm().transpose();

    const CMatrix& H = channel.entries;
    const double h_norm = H.norm();
    const std::size_t limit = iteration_limit(stop, static_cast<std::size_t>(H.size()),
                                              static_cast<std::size_t>(p_theta) * p_tau);

    SparseSupport out;
    out.residual_norms.push_back(h_norm);

    CMatrix residual = H;
    CMatrix corr_h; // A^H H conj(B): right-hand side of every refit
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> taken =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(p_theta, p_tau, false);
    std::vector<int> sel_p, sel_q;

    while (out.entries.size() < limit) {
        if (residual_small_enough(stop, out.residual_norms.back(), h_norm))
            break;
        const CMatrix corr = (a_adj * residual) * b_conj;
        if (sel_p.empty())
            corr_h = corr;

        // Argmax of the normalized correlation; the scan order makes ties
        // resolve to the lowest (p_theta, p_tau).
        double best = 0.0;
        int best_p = -1, best_q = -1;
        for (int p = 0; p < p_theta; ++p) {
            for (int q = 0; q < p_tau; ++q) {
                if (taken(p, q))
                    continue;
                const double v = std::abs(corr(p, q)) / (a_norm(p) * b_norm(q));
                if (v > best) {
                    best = v;
                    best_p = p;
                    best_q = q;
                }
            }
        }
        if (best_p < 0)
            break; // residual is orthogonal to every remaining atom
        taken(best_p, best_q) = true;
        sel_p.push_back(best_p);
        sel_q.push_back(best_q);

        const Eigen::Index t = static_cast<Eigen::Index>(sel_p.size());
        CMatrix gram(t, t);
        CVector rhs(t);
        for (Eigen::Index u = 0; u < t; ++u) {
            rhs(u) = corr_h(sel_p[u], sel_q[u]);
            for (Eigen::Index v = 0; v < t; ++v)
                gram(u, v) = A.col(sel_p[u]).dot(A.col(sel_p[v])) * B.col(sel_q[u]).dot(B.col(sel_q[v]));
        }
        const CVector coeff = solve_gram(gram, rhs);

        CMatrix a_sel(A.rows(), t), b_sel(B.rows(), t);
        for (Eigen::Index u = 0; u < t; ++u) {
            a_sel.col(u) = A.col(sel_p[u]) * coeff(u);
            b_sel.col(u) = B.col(sel_q[u]);
        }
        residual = H;
        residual.noalias() -= a_sel * b_sel.transpose();

        out.entries.clear();
        for (Eigen::Index u = 0; u < t; ++u)
            out.entries.push_back({sel_p[u], sel_q[u], coeff(u)});
        out.residual_norms.push_back(residual.norm());
    }
    return out;
}

SparseSupport omp1d(const ChannelMatrix& channel, const Dictionary& angle, const Dictionary& delay,
                    const StopRule& stop, std::size_t memory_cap_bytes)
{
    stop.validate();
    check_dictionaries(channel, angle, delay);

    const int R = channel.rows();
    const int S = channel.cols();
    const int p_theta = angle.size();
    const int p_tau = delay.size();
    const std::size_t bytes = omp1d_dictionary_bytes(R, S, p_theta, p_tau);
    if (bytes > memory_cap_bytes)
        throw MemoryCapError("vectorized OMP needs a " + std::to_string(bytes >> 20) +
                             " MiB Kronecker dictionary, over the " +
                             std::to_string(memory_cap_bytes >> 20) + " MiB cap; use omp2d");

    // D = B kron A: column q*P_theta + p, row r + s*R.
    const Eigen::Index n_obs = static_cast<Eigen::Index>(R) * S;
    CMatrix D(n_obs, static_cast<Eigen::Index>(p_theta) * p_tau);
    for (int q = 0; q < p_tau; ++q)
        for (int p = 0; p < p_theta; ++p)
            for (int s = 0; s < S; ++s)
                for (int r = 0; r < R; ++r)
                    D(r + static_cast<Eigen::Index>(s) * R, static_cast<Eigen::Index>(q) * p_theta + p) =
                        angle.atoms(r, p) * delay.atoms(s, q);
    const RVector col_norm = D.colwise().norm().transpose();

    const CVector h = Eigen::Map<const CVector>(channel.entries.data(), n_obs);
    const double h_norm = h.norm();
    const std::size_t limit =
        iteration_limit(stop, static_cast<std::size_t>(n_obs), static_cast<std::size_t>(D.cols()));

    SparseSupport out;
    out.residual_norms.push_back(h_norm);
    CVector residual = h;
    std::vector<Eigen::Index> selected;
    std::vector<bool> taken(static_cast<std::size_t>(D.cols()), false);

    while (out.entries.size() < limit) {
        if (residual_small_enough(stop, out.residual_norms.back(), h_norm))
            break;
        const CVector corr = D.adjoint() * residual;
        double best = 0.0;
        Eigen::Index best_k = -1;
        for (int p = 0; p < p_theta; ++p) {
            for (int q = 0; q < p_tau; ++q) {
                const Eigen::Index k = static_cast<Eigen::Index>(q) * p_theta + p;
                if (taken[static_cast<std::size_t>(k)])
                    continue;
                const double v = std::abs(corr(k)) / col_norm(k);
                if (v > best) {
                    best = v;
                    best_k = k;
                }
            }
        }
        if (best_k < 0)
            break;
        taken[static_cast<std::size_t>(best_k)] = true;
        selected.push_back(best_k);

        const Eigen::Index t = static_cast<Eigen::Index>(selected.size());
        CMatrix d_sel(n_obs, t);
        for (Eigen::Index u = 0; u < t; ++u)
            d_sel.col(u) = D.col(selected[u]);
        const CMatrix gram = d_sel.adjoint() * d_sel;
        const CVector rhs = d_sel.adjoint() * h;
        const CVector coeff = solve_gram(gram, rhs);
        residual = h - d_sel * coeff;

        out.entries.clear();
        for (Eigen::Index u = 0; u < t; ++u)
            out.entries.push_back({static_cast<int>(selected[u] % p_theta),
                                   static_cast<int>(selected[u] / p_theta), coeff(u)});
        out.residual_norms.push_back(residual.norm());
    }
    return out;
}

OmpEstimator::OmpEstimator(int rows, int cols, int p_theta, int p_tau)
    : angle_(build_dictionary(rows, p_theta, DictionaryKind::Angle)),
      delay_(build_dictionary(cols, p_tau, DictionaryKind::Delay))
{
}

SignatureEstimate OmpEstimator::estimate(const ChannelMatrix& channel, const StopRule& stop,
                                         Method variant, std::size_t memory_cap_bytes) const
{
    SparseSupport support;
    if (variant == Method::Omp1d)
        support = omp1d(channel, angle_, delay_, stop, memory_cap_bytes);
    else if (variant == Method::Omp2d)
        support = omp2d(channel, angle_, delay_, stop);
    else
        throw ConfigError("OmpEstimator runs omp2d or omp1d only");

    SignatureEstimate est;
    est.method = variant;
    for (const auto& e : support.entries)
        est.paths.push_back({e.coeff, angle_.grid[e.p_theta], delay_.grid[e.p_tau]});
    est.sort_by_gain();
    return est;
}

SignatureEstimate estimate_omp(const ChannelMatrix& channel, int p_theta, int p_tau, const StopRule& stop)
{
    return OmpEstimator(channel.rows(), channel.cols(), p_theta, p_tau).estimate(channel, stop);
}

} // namespace dtek
