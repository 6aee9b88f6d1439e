#include "dtek/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dtek {

void ThresholdPolicy::validate() const
{
    switch (kind) {
    case Kind::Relative:
        if (!(value >= 0.0 && value < 1.0))
            throw ConfigError("relative threshold must lie in [0, 1)");
        break;
    case Kind::Cfar:
        if (!(value > 0.0 && value < 1.0))
            throw ConfigError("CFAR false-alarm probability must lie in (0, 1)");
        break;
    }
}

std::string ThresholdPolicy::describe() const
{
    std::ostringstream os;
    os << (kind == Kind::Relative ? "relative(" : "cfar(") << value << ")";
    return os.str();
}

namespace {

// exp(sign * j 2 pi (n*k mod N) / N); the index product is reduced first so
// that large n*k do not lose phase precision.
Complex dft_phasor(long long n, long long k, int size, double sign)
{
    const long long m = (n * k) % size;
    return phasor(sign * kTwoPi * static_cast<double>(m) / size);
}

} // namespace

CVector dft_vector(int i, int n)
{
    if (n < 1 || i < 0 || i >= n)
        throw IndexError("DFT index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
    CVector f(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k)
        f(k) = scale * dft_phasor(k, i, n, -1.0);
    return f;
}

CMatrix dft_matrix(int n)
{
    CMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row)
            f(row, col) = scale * dft_phasor(row, col, n, -1.0);
    return f;
}

AngleDelayMap idft2(const ChannelMatrix& channel)
{
    const CMatrix fr = dft_matrix(channel.rows());
    const CMatrix fs = dft_matrix(channel.cols());
    AngleDelayMap map;
    map.entries.noalias() = fr.adjoint() * channel.entries * fs.conjugate();
    return map;
}

double dirichlet(double x, int n)
{
    const double k = std::round(x);
    const double s = std::sin(kPi * x);
    if (std::abs(x - k) < 1e-12 || s == 0.0) {
        // Limit at integer x: N * (-1)^{k (N-1)}.
        const long long parity = (static_cast<long long>(k) * (n - 1)) % 2;
        return parity == 0 ? n : -n;
    }
    return std::sin(kPi * n * x) / s;
}

double peak_threshold(const AngleDelayMap& map, const ThresholdPolicy& policy)
{
    policy.validate();
    const Eigen::ArrayXXd mag = map.entries.array().abs();
    if (policy.kind == ThresholdPolicy::Kind::Relative)
        return policy.value * mag.maxCoeff();

    std::vector<double> values(mag.data(), mag.data() + mag.size());
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double median = values[mid];
    if (values.size() % 2 == 0) {
        const double lower = *std::max_element(values.begin(), values.begin() + mid);
        median = 0.5 * (median + lower);
    }
    const double sigma = median / std::sqrt(std::log(4.0));
    return sigma * std::sqrt(-2.0 * std::log(policy.value));
}

std::vector<CoarseBin> detect_peaks(const AngleDelayMap& map, const ThresholdPolicy& policy)
{
    const int rows = static_cast<int>(map.entries.rows());
    const int cols = static_cast<int>(map.entries.cols());
    std::vector<CoarseBin> peaks;
    if (rows == 0 || cols == 0)
        return peaks;

    const Eigen::ArrayXXd mag = map.entries.array().abs();
    const double threshold = peak_threshold(map, policy);

    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double v = mag(i, j);
            if (!(v > threshold))
                continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    const int ni = (i + di + rows) % rows;
                    const int nj = (j + dj + cols) % cols;
                    if (ni == i && nj == j)
                        continue;
                    if (mag(ni, nj) >= v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max)
                peaks.push_back({i, j, map.entries(i, j)});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const CoarseBin& a, const CoarseBin& b) {
        return std::abs(a.value) > std::abs(b.value);
    });
    return peaks;
}

CVector bin_weights(int index, int n, double offset)
{
    CVector w(n);
    for (int k = 0; k < n; ++k) {
        const double grid = static_cast<double>((static_cast<long long>(k) * index) % n) / n;
        w(k) = phasor(kTwoPi * (grid + k * offset));
    }
    return w;
}

Complex bin_power(const ChannelMatrix& channel, int i, int j, double theta_off, double tau_off)
{
    const int R = channel.rows();
    const int S = channel.cols();
    if (i < 0 || i >= R || j < 0 || j >= S)
        throw IndexError("bin (" + std::to_string(i) + ", " + std::to_string(j) + ") outside map");
    const CVector wr = bin_weights(i, R, theta_off);
    const CVector ws = bin_weights(j, S, tau_off);
    const Complex acc = wr.transpose() * (channel.entries * ws);
    return acc * (1.0 / std::sqrt(static_cast<double>(R) * S));
}

SignatureEstimate estimate_dft(const ChannelMatrix& channel, const ThresholdPolicy& policy)
{
    SignatureEstimate est;
    est.method = Method::Dft;
    const int R = channel.rows();
    const int S = channel.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(R) * S);
    for (const auto& bin : detect_peaks(idft2(channel), policy))
        est.paths.push_back({bin.value * scale, static_cast<double>(bin.i) / R,
                             static_cast<double>(bin.j) / S});
    est.sort_by_gain();
    return est;
}

std::string magnitude_csv(const AngleDelayMap& map)
{
    std::string out;
    char buf[32];
    for (Eigen::Index i = 0; i < map.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < map.entries.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", std::abs(map.entries(i, j)));
            if (j > 0)
                out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace dtek
