#include "dtek/music.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <cblas.h>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace dtek {

SmoothingSpec SmoothingSpec::default_for(int rows, int cols)
{
    return {(rows + 1) / 2, (cols + 1) / 2};
}

long long SmoothingSpec::patch_count(int rows, int cols) const
{
    return static_cast<long long>(rows - sub_r + 1) * (cols - sub_s + 1);
}

void SmoothingSpec::validate(int rows, int cols, int expected_paths) const
{
    if (sub_r <= 1 || sub_r > rows || sub_s <= 1 || sub_s > cols)
        throw ConfigError("smoothing subarray " + std::to_string(sub_r) + "x" + std::to_string(sub_s) +
                          " must satisfy 1 < sub <= " + std::to_string(rows) + "x" + std::to_string(cols));
    if (expected_paths > 0 && patch_count(rows, cols) <= expected_paths)
        throw ConfigError("smoothing yields " + std::to_string(patch_count(rows, cols)) +
                          " patches, not more than the " + std::to_string(expected_paths) +
                          " expected paths");
}

namespace {

HermitianEigen run_zheevr(const CMatrix& matrix, char range, int il, int iu)
{
    const lapack_int n = static_cast<lapack_int>(matrix.rows());
    if (matrix.cols() != matrix.rows())
        throw DimensionError("eigen-decomposition needs a square matrix");
    HermitianEigen out;
    if (n == 0)
        return out;

    CMatrix work = matrix; // zheevr overwrites its input
    const lapack_int want = range == 'A' ? n : iu - il + 1;
    RVector w(n);
    CMatrix z(n, want);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max<lapack_int>(want, 1)));
    lapack_int found = 0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, work.data(), n, 0.0, 0.0,
                                           il, iu, abstol, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0)
        throw DomainError("Hermitian eigen-decomposition failed (zheevr info " + std::to_string(info) + ")");
    out.values = w.head(found);
    out.vectors = z.leftCols(found);
    return out;
}

} // namespace

HermitianEigen hermitian_eigen(const CMatrix& matrix)
{
    return run_zheevr(matrix, 'A', 0, 0);
}

HermitianEigen hermitian_eigen_top(const CMatrix& matrix, int count)
{
    const int n = static_cast<int>(matrix.rows());
    if (count < 1 || count > n)
        throw RankError("requested " + std::to_string(count) + " eigenpairs of a " + std::to_string(n) +
                        "-dimensional matrix");
    return run_zheevr(matrix, 'I', n - count + 1, n);
}

CMatrix smoothed_covariance(const ChannelMatrix& channel, const SmoothingSpec& spec)
{
    const int R = channel.rows();
    const int S = channel.cols();
    spec.validate(R, S);
    const Eigen::Index dim = static_cast<Eigen::Index>(spec.sub_r) * spec.sub_s;
    const long long patches = spec.patch_count(R, S);

    CMatrix snapshots(dim, patches);
    Eigen::Index col = 0;
    for (int ds = 0; ds + spec.sub_s <= S; ++ds) {
        for (int dr = 0; dr + spec.sub_r <= R; ++dr, ++col) {
            for (int s = 0; s < spec.sub_s; ++s)
                snapshots.col(col).segment(static_cast<Eigen::Index>(s) * spec.sub_r, spec.sub_r) =
                    channel.entries.block(dr, ds + s, spec.sub_r, 1);
        }
    }

    CMatrix cov = CMatrix::Zero(dim, dim);
    cblas_zherk(CblasColMajor, CblasLower, CblasNoTrans, static_cast<blasint>(dim), static_cast<blasint>(patches),
                1.0 / static_cast<double>(patches), snapshots.data(), static_cast<blasint>(dim), 0.0, cov.data(),
                static_cast<blasint>(dim));
    // Mirror the lower triangle so the result is exactly Hermitian.
    cov = cov.selfadjointView<Eigen::Lower>();
    return cov;
}

CMatrix noise_subspace(const CMatrix& covariance, int q_hat)
{
    const int dim = static_cast<int>(covariance.rows());
    if (q_hat < 0 || q_hat >= dim)
        throw RankError("signal dimension " + std::to_string(q_hat) + " must be below the covariance size " +
                        std::to_string(dim));
    const HermitianEigen eig = hermitian_eigen(covariance);
    return eig.vectors.leftCols(dim - q_hat);
}

namespace {

CMatrix steering_grid(int length, int grid_p)
{
    CMatrix g(length, grid_p);
    for (int k = 0; k < grid_p; ++k)
        for (int n = 0; n < length; ++n)
            g(n, k) = phasor(-kTwoPi * static_cast<double>((static_cast<long long>(n) * k) % grid_p) / grid_p);
    return g;
}

Eigen::MatrixXd pseudospectrum_from_signal(const CMatrix& signal_vectors, const SmoothingSpec& spec, int grid_p)
{
    const CMatrix ag = steering_grid(spec.sub_r, grid_p);
    const CMatrix bg = steering_grid(spec.sub_s, grid_p);
    const double steer_energy = static_cast<double>(spec.sub_r) * spec.sub_s;

    // ||E_n^H v||^2 = ||v||^2 - ||E_s^H v||^2 because [E_s E_n] is unitary.
    // Each e_k^H (b kron a) is a(theta)^T conj(E_k) b(tau) with E_k the
    // eigenvector reshaped to sub_r x sub_s.
    Eigen::MatrixXd projected = Eigen::MatrixXd::Zero(grid_p, grid_p);
    for (Eigen::Index k = 0; k < signal_vectors.cols(); ++k) {
        const Eigen::Map<const CMatrix> ek(signal_vectors.col(k).data(), spec.sub_r, spec.sub_s);
        const CMatrix left = ag.transpose() * ek.conjugate();
        projected += (left * bg).cwiseAbs2();
    }
    const double floor = steer_energy * 1e-300;
    Eigen::MatrixXd spectrum(grid_p, grid_p);
    for (Eigen::Index j = 0; j < grid_p; ++j)
        for (Eigen::Index i = 0; i < grid_p; ++i)
            spectrum(i, j) = 1.0 / std::max(steer_energy - projected(i, j), floor);
    return spectrum;
}

} // namespace

Eigen::MatrixXd music_pseudospectrum(const ChannelMatrix& channel, const SmoothingSpec& spec, int q_hat,
                                     int grid_p)
{
    if (grid_p < 3)
        throw ConfigError("MUSIC grid needs at least 3 points per axis");
    const CMatrix cov = smoothed_covariance(channel, spec);
    if (q_hat < 0 || q_hat >= cov.rows())
        throw RankError("signal dimension " + std::to_string(q_hat) + " must be below the covariance size " +
                        std::to_string(cov.rows()));
    if (q_hat == 0)
        return Eigen::MatrixXd::Constant(grid_p, grid_p, 1.0 / (static_cast<double>(spec.sub_r) * spec.sub_s));
    return pseudospectrum_from_signal(hermitian_eigen_top(cov, q_hat).vectors, spec, grid_p);
}

std::size_t music_working_bytes(const ChannelMatrix& channel, const SmoothingSpec& spec)
{
    const std::size_t dim = static_cast<std::size_t>(spec.sub_r) * spec.sub_s;
    const std::size_t patches = static_cast<std::size_t>(std::max<long long>(spec.patch_count(channel.rows(), channel.cols()), 0));
    // snapshots + covariance + solver copy + solver workspace
    return sizeof(Complex) * (dim * patches + 3 * dim * dim);
}

SignatureEstimate estimate_music(const ChannelMatrix& channel, const SmoothingSpec& spec, int q_hat,
                                 int grid_p, std::size_t memory_cap_bytes)
{
    const int R = channel.rows();
    const int S = channel.cols();
    spec.validate(R, S, q_hat);
    const std::size_t bytes = music_working_bytes(channel, spec);
    if (bytes > memory_cap_bytes)
        throw MemoryCapError("MUSIC needs about " + std::to_string(bytes >> 20) + " MiB, over the " +
                             std::to_string(memory_cap_bytes >> 20) + " MiB cap");

    SignatureEstimate est;
    est.method = Method::Music;
    if (q_hat == 0)
        return est;

    const Eigen::MatrixXd spectrum = music_pseudospectrum(channel, spec, q_hat, grid_p);

    struct Peak {
        double value;
        int i, j;
    };
    std::vector<Peak> peaks;
    const auto index_of = [grid_p](int i, int j) { return static_cast<long long>(i) * grid_p + j; };
    for (int i = 0; i < grid_p; ++i) {
        for (int j = 0; j < grid_p; ++j) {
            const double v = spectrum(i, j);
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0)
                        continue;
                    const int ni = (i + di + grid_p) % grid_p;
                    const int nj = (j + dj + grid_p) % grid_p;
                    const double nv = spectrum(ni, nj);
                    // On plateaus the first point in raster order wins.
                    if (nv > v || (nv == v && index_of(ni, nj) < index_of(i, j))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max)
                peaks.push_back({v, i, j});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
    if (static_cast<int>(peaks.size()) > q_hat)
        peaks.resize(static_cast<std::size_t>(q_hat));

    // Least-squares gains of the full model on the estimated steering pairs.
    const Eigen::Index t = static_cast<Eigen::Index>(peaks.size());
    std::vector<CVector> a(peaks.size()), b(peaks.size());
    for (std::size_t k = 0; k < peaks.size(); ++k) {
        a[k] = angle_steering(static_cast<double>(peaks[k].i) / grid_p, R);
        b[k] = delay_steering(static_cast<double>(peaks[k].j) / grid_p, S);
    }
    CMatrix gram(t, t);
    CVector rhs(t);
    for (Eigen::Index u = 0; u < t; ++u) {
        rhs(u) = a[u].dot(channel.entries * b[u].conjugate());
        for (Eigen::Index v = 0; v < t; ++v)
            gram(u, v) = a[u].dot(a[v]) * b[u].dot(b[v]);
    }
    const CVector gains = gram.completeOrthogonalDecomposition().solve(rhs);

    for (Eigen::Index u = 0; u < t; ++u)
        est.paths.push_back({gains(u), static_cast<double>(peaks[u].i) / grid_p,
                             static_cast<double>(peaks[u].j) / grid_p});
    est.sort_by_gain();
    return est;
}

} // namespace dtek
