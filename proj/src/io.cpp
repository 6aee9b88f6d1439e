#include "dtek/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace dtek {

namespace {

void put_u32(std::ostream& out, std::uint32_t v)
{
    std::array<char, 4> b;
    for (int k = 0; k < 4; ++k)
        b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
    out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b;
    for (int k = 0; k < 8; ++k)
        b[k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
    out.write(b.data(), 8);
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what)
{
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw FormatError(std::string("channel file truncated while reading ") + what);
}

std::uint32_t get_u32(std::istream& in, const char* what)
{
    std::array<unsigned char, 4> b;
    read_exact(in, reinterpret_cast<char*>(b.data()), 4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
        v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
    return v;
}

double get_f64(std::istream& in, const char* what)
{
    std::array<unsigned char, 8> b;
    read_exact(in, reinterpret_cast<char*>(b.data()), 8, what);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
        v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return std::bit_cast<double>(v);
}

} // namespace

void write_channel(std::ostream& out, const ChannelMatrix& channel)
{
    out.write(kChannelMagic, sizeof kChannelMagic);
    put_u32(out, static_cast<std::uint32_t>(channel.rows()));
    put_u32(out, static_cast<std::uint32_t>(channel.cols()));
    put_f64(out, channel.noise_variance);
    for (int r = 0; r < channel.rows(); ++r) {
        for (int s = 0; s < channel.cols(); ++s) {
            put_f64(out, channel.entries(r, s).real());
            put_f64(out, channel.entries(r, s).imag());
        }
    }
}

ChannelMatrix read_channel(std::istream& in)
{
    char magic[sizeof kChannelMagic];
    read_exact(in, magic, sizeof magic, "magic");
    if (std::memcmp(magic, kChannelMagic, sizeof magic) != 0)
        throw FormatError("not a channel file (bad magic; expected DTEK1)");
    const std::uint32_t rows = get_u32(in, "header");
    const std::uint32_t cols = get_u32(in, "header");
    if (rows < 1 || cols < 1 || rows > (1u << 16) || cols > (1u << 16))
        throw FormatError("channel dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " out of range");
    ChannelMatrix ch;
    ch.noise_variance = get_f64(in, "header");
    if (!(ch.noise_variance >= 0.0))
        throw FormatError("channel noise variance must be >= 0");
    ch.entries.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t s = 0; s < cols; ++s) {
            const double re = get_f64(in, "entries");
            const double im = get_f64(in, "entries");
            ch.entries(r, s) = Complex(re, im);
        }
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing bytes after channel entries");
    return ch;
}

void write_file_atomic(const std::string& path, const std::function<void(std::ostream&)>& producer)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw IoError("cannot open " + tmp.string() + " for writing");
            producer(out);
            out.flush();
            if (!out)
                throw IoError("write to " + tmp.string() + " failed");
        }
        std::error_code ec;
        fs::rename(tmp, target, ec);
        if (ec)
            throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
    } catch (...) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw;
    }
}

void write_channel_file(const std::string& path, const ChannelMatrix& channel)
{
    write_file_atomic(path, [&](std::ostream& out) { write_channel(out, channel); });
}

ChannelMatrix read_channel_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open channel file " + path);
    return read_channel(in);
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string optional_cell(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

} // namespace

std::string sweep_csv(const std::vector<MetricsSummary>& summaries)
{
    std::ostringstream out;
    out << "method,snr_db,trials,failed_trials,seed_base,hit_rate,false_rate,rmse_doa_deg,rmse_toa_s,rmse_gain,"
           "rmse_theta_norm,rmse_tau_norm\n";
    for (const auto& s : summaries) {
        out << s.method << ',' << format_double(s.snr_db) << ',' << s.trials << ',' << s.failed_trials << ','
            << s.seed_base << ',' << format_double(s.hit_rate) << ',' << format_double(s.false_rate) << ','
            << optional_cell(s.rmse_doa_deg) << ',' << optional_cell(s.rmse_toa_s) << ','
            << optional_cell(s.rmse_gain) << ',' << optional_cell(s.rmse_theta_norm) << ','
            << optional_cell(s.rmse_tau_norm) << '\n';
    }
    return out.str();
}

std::string runtime_table_csv(const RuntimeTable& table)
{
    std::ostringstream out;
    out << "method";
    for (int q : table.num_paths)
        for (int n : table.sizes)
            out << ",q" << q << '_' << n << 'x' << n;
    out << '\n';
    for (std::size_t mi = 0; mi < table.methods.size(); ++mi) {
        out << to_string(table.methods[mi]);
        for (std::size_t qi = 0; qi < table.num_paths.size(); ++qi) {
            for (std::size_t si = 0; si < table.sizes.size(); ++si) {
                const RuntimeCell& c = table.cells[mi][qi][si];
                out << ',';
                switch (c.status) {
                case RuntimeCell::Status::Measured:
                    out << format_double(c.median_s);
                    break;
                case RuntimeCell::Status::MemoryCap:
                    out << "memcap";
                    break;
                case RuntimeCell::Status::Skipped:
                    out << "skipped";
                    break;
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace dtek
