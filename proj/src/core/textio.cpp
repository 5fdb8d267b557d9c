#include "core/textio.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/version.hpp"

namespace sqz::io {

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

template <typename T> void put_le(std::string &out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T> T get_le(const std::string &in, size_t &pos) {
    if (pos + sizeof(T) > in.size()) throw io_error("binary file truncated");
    char buf[sizeof(T)];
    std::memcpy(buf, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    pos += sizeof(T);
    return v;
}

std::string read_binary_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_binary_file(const std::string &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot write " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw io_error("write failed: " + path);
}

} // namespace

uint64_t fnv1a64(const void *data, size_t n) {
    uint64_t h = kFnvOffset;
    const auto *p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

uint64_t fnv1a64(const std::string &s) { return fnv1a64(s.data(), s.size()); }

uint64_t fnv1a64_file(const std::string &path) {
    const auto content = read_binary_file(path);
    return fnv1a64(content.data(), content.size());
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string FileHeader::render() const {
    std::string out = "# sqztrack " + std::string(kVersion) + "\n";
    if (!config_hash.empty()) out += "# config_hash = " + config_hash + "\n";
    for (const auto &[k, v] : meta) out += "# " + k + " = " + v + "\n";
    if (!columns.empty()) out += "# columns: " + columns + "\n";
    return out;
}

void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_error("cannot write " + path);
    f << content;
    if (!f) throw io_error("write failed: " + path);
}

std::string read_text_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void save_trajectory_text(const dynamics::Trajectory &t,
                          const std::string &path,
                          const std::string &config_hash) {
    FileHeader hdr;
    hdr.config_hash = config_hash;
    hdr.meta = {{"dt_s", format_double(t.dt)},
                {"seed", std::to_string(t.seed)},
                {"generator", t.generator},
                {"rng", t.rng},
                {"normal_method", t.normal_method}};
    hdr.columns = "time_s position_m";
    std::string out = hdr.render();
    for (size_t i = 0; i < t.positions.size(); ++i) {
        out += format_double(static_cast<double>(i) * t.dt);
        out += ' ';
        out += format_double(t.positions[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void save_trajectory_binary(const dynamics::Trajectory &t,
                            const std::string &path) {
    std::string out;
    out.reserve(36 + 8 * t.positions.size());
    out.append("SQZTRAJ1", 8);
    put_le<uint32_t>(out, 1);
    put_le<double>(out, t.dt);
    put_le<uint64_t>(out, t.positions.size());
    put_le<uint64_t>(out, t.seed);
    for (double x : t.positions) put_le<double>(out, x);
    write_binary_file(path, out);
}

dynamics::Trajectory load_trajectory_binary(const std::string &path) {
    const auto buf = read_binary_file(path);
    if (buf.size() < 36 || buf.compare(0, 8, "SQZTRAJ1") != 0)
        throw io_error("not a trajectory file: " + path);
    size_t pos = 8;
    const auto version = get_le<uint32_t>(buf, pos);
    if (version != 1) throw io_error("unsupported trajectory version");
    dynamics::Trajectory t;
    t.dt = get_le<double>(buf, pos);
    const auto n = get_le<uint64_t>(buf, pos);
    t.seed = get_le<uint64_t>(buf, pos);
    t.generator = "loaded";
    t.positions.resize(n);
    for (auto &x : t.positions) x = get_le<double>(buf, pos);
    t.validate();
    return t;
}

void save_raw_record_binary(const lockin::RawRecord &r,
                            const std::string &path) {
    std::string out;
    out.reserve(44 + 8 * r.samples.size());
    out.append("SQZRAW01", 8);
    put_le<uint32_t>(out, 1);
    put_le<double>(out, r.sample_rate);
    put_le<uint64_t>(out, r.samples.size());
    put_le<uint64_t>(out, r.seed);
    put_le<double>(out, r.carrier_freq);
    for (double x : r.samples) put_le<double>(out, x);
    write_binary_file(path, out);
}

lockin::RawRecord load_raw_record_binary(const std::string &path) {
    const auto buf = read_binary_file(path);
    if (buf.size() < 44 || buf.compare(0, 8, "SQZRAW01") != 0)
        throw io_error("not a raw record file: " + path);
    size_t pos = 8;
    const auto version = get_le<uint32_t>(buf, pos);
    if (version != 1) throw io_error("unsupported raw record version");
    lockin::RawRecord r;
    r.sample_rate = get_le<double>(buf, pos);
    const auto n = get_le<uint64_t>(buf, pos);
    r.seed = get_le<uint64_t>(buf, pos);
    r.carrier_freq = get_le<double>(buf, pos);
    r.samples.resize(n);
    for (auto &x : r.samples) x = get_le<double>(buf, pos);
    r.validate();
    return r;
}

void save_spectrum_text(const spectrum::Spectrum &s, const std::string &path,
                        const std::string &config_hash) {
    FileHeader hdr;
    hdr.config_hash = config_hash;
    hdr.meta = {{"averaging_count", std::to_string(s.averaging_count)},
                {"units", "frequency Hz, psd units^2/Hz, rbw Hz"}};
    hdr.columns = "frequency_hz psd rbw_hz";
    std::string out = hdr.render();
    const std::string rbw = format_double(s.resolution_bandwidth);
    for (size_t i = 0; i < s.frequencies.size(); ++i) {
        out += format_double(s.frequencies[i]);
        out += ' ';
        out += format_double(s.psd[i]);
        out += ' ';
        out += rbw;
        out += '\n';
    }
    write_text_file(path, out);
}

void save_msd_text(const microrheology::MsdCurve &c, const std::string &path,
                   const std::string &config_hash) {
    FileHeader hdr;
    hdr.config_hash = config_hash;
    hdr.meta = {{"units", "lag s, msd m^2, stderr m^2"}};
    hdr.columns = "lag_s msd_m2 stderr_m2 n_pairs";
    std::string out = hdr.render();
    for (size_t i = 0; i < c.size(); ++i) {
        out += format_double(c.lags[i]);
        out += ' ';
        out += format_double(c.msd[i]);
        out += ' ';
        out += format_double(c.stderr_m2[i]);
        out += ' ';
        out += std::to_string(c.n_pairs[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void save_alpha_track_text(const microrheology::AlphaTrack &t,
                           const std::string &path,
                           const std::string &config_hash) {
    FileHeader hdr;
    hdr.config_hash = config_hash;
    hdr.meta = {{"window_s", format_double(t.window_length)},
                {"hop_s", format_double(t.hop)},
                {"units", "center s, alpha dimensionless (nan = gap)"}};
    hdr.columns = "window_center_s alpha alpha_stderr";
    std::string out = hdr.render();
    for (size_t i = 0; i < t.window_centers.size(); ++i) {
        out += format_double(t.window_centers[i]);
        out += ' ';
        out += format_double(t.alphas[i]);
        out += ' ';
        out += format_double(t.stderrs[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

} // namespace sqz::io
