#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "epirl/errors.hpp"

namespace epirl {

/// Writes via a sibling temp file + rename so readers never observe a
/// partially written output.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace detail {

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view field, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::runtime_error(std::string("bad ") + what + " value: '" + std::string(field) +
                                 "'");
    return v;
}

inline std::int64_t parse_int(std::string_view field, const char* what) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::runtime_error(std::string("bad ") + what + " value: '" + std::string(field) +
                                 "'");
    return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

/// Lines of `text`, with trailing CR stripped; keeps empty interior lines.
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = nl + 1;
    }
    return lines;
}

} // namespace detail

/// One simulated day of one run; ODE rows use run_id = -1, ABM ensemble rows
/// use run_id = 0..runs-1.
struct TrajectoryRow {
    std::int64_t run_id = 0;
    std::int64_t t = 0;
    double s = 0, i = 0, r = 0;
    bool operator==(const TrajectoryRow&) const = default;
};

struct TrajectoryCsv {
    std::vector<std::string> provenance; // emitted as leading '#' comments
    std::vector<TrajectoryRow> rows;
    bool operator==(const TrajectoryCsv&) const = default;
};

inline std::string emit_trajectory_csv(const TrajectoryCsv& data) {
    std::string out;
    for (const auto& line : data.provenance) out += "# " + line + "\n";
    out += "run_id,t,s,i,r\n";
    for (const auto& row : data.rows) {
        out += std::to_string(row.run_id);
        out += ',';
        out += std::to_string(row.t);
        out += ',';
        out += detail::csv_double(row.s);
        out += ',';
        out += detail::csv_double(row.i);
        out += ',';
        out += detail::csv_double(row.r);
        out += '\n';
    }
    return out;
}

inline TrajectoryCsv parse_trajectory_csv(std::string_view text) {
    TrajectoryCsv data;
    bool saw_header = false;
    for (auto line : detail::split_lines(text)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            data.provenance.emplace_back(body);
            continue;
        }
        if (!saw_header) {
            if (line != "run_id,t,s,i,r")
                throw std::runtime_error("unexpected trajectory CSV header: '" +
                                         std::string(line) + "'");
            saw_header = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 5)
            throw std::runtime_error("trajectory CSV row needs 5 fields: '" + std::string(line) +
                                     "'");
        TrajectoryRow row;
        row.run_id = detail::parse_int(f[0], "run_id");
        row.t = detail::parse_int(f[1], "t");
        row.s = detail::parse_double(f[2], "s");
        row.i = detail::parse_double(f[3], "i");
        row.r = detail::parse_double(f[4], "r");
        data.rows.push_back(row);
    }
    if (!saw_header) throw std::runtime_error("trajectory CSV has no header row");
    return data;
}

struct EvalRow {
    std::int64_t episode = 0;
    double ret = 0.0; // mean per-step reward of the episode
    std::int64_t n_lockdown = 0, n_distancing = 0, n_open = 0;
    double beta = 0.0;
    bool operator==(const EvalRow&) const = default;
};

struct EvalCsv {
    std::vector<std::string> provenance;
    std::vector<EvalRow> rows;
    bool operator==(const EvalCsv&) const = default;
};

inline std::string emit_eval_csv(const EvalCsv& data) {
    std::string out;
    for (const auto& line : data.provenance) out += "# " + line + "\n";
    out += "episode,return,n_lockdown,n_distancing,n_open,beta\n";
    for (const auto& row : data.rows) {
        out += std::to_string(row.episode);
        out += ',';
        out += detail::csv_double(row.ret);
        out += ',';
        out += std::to_string(row.n_lockdown);
        out += ',';
        out += std::to_string(row.n_distancing);
        out += ',';
        out += std::to_string(row.n_open);
        out += ',';
        out += detail::csv_double(row.beta);
        out += '\n';
    }
    return out;
}

inline EvalCsv parse_eval_csv(std::string_view text) {
    EvalCsv data;
    bool saw_header = false;
    for (auto line : detail::split_lines(text)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            data.provenance.emplace_back(body);
            continue;
        }
        if (!saw_header) {
            if (line != "episode,return,n_lockdown,n_distancing,n_open,beta")
                throw std::runtime_error("unexpected eval CSV header: '" + std::string(line) +
                                         "'");
            saw_header = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 6)
            throw std::runtime_error("eval CSV row needs 6 fields: '" + std::string(line) + "'");
        EvalRow row;
        row.episode = detail::parse_int(f[0], "episode");
        row.ret = detail::parse_double(f[1], "return");
        row.n_lockdown = detail::parse_int(f[2], "n_lockdown");
        row.n_distancing = detail::parse_int(f[3], "n_distancing");
        row.n_open = detail::parse_int(f[4], "n_open");
        row.beta = detail::parse_double(f[5], "beta");
        data.rows.push_back(row);
    }
    if (!saw_header) throw std::runtime_error("eval CSV has no header row");
    return data;
}

struct SweepRow {
    std::int64_t sample = 0;
    double beta = 0.0;
    double mean_return = 0.0;
    bool operator==(const SweepRow&) const = default;
};

struct SweepCsv {
    std::vector<std::string> provenance;
    std::vector<SweepRow> rows;
    bool operator==(const SweepCsv&) const = default;
};

inline std::string emit_sweep_csv(const SweepCsv& data) {
    std::string out;
    for (const auto& line : data.provenance) out += "# " + line + "\n";
    out += "sample,beta,mean_return\n";
    for (const auto& row : data.rows) {
        out += std::to_string(row.sample);
        out += ',';
        out += detail::csv_double(row.beta);
        out += ',';
        out += detail::csv_double(row.mean_return);
        out += '\n';
    }
    return out;
}

inline SweepCsv parse_sweep_csv(std::string_view text) {
    SweepCsv data;
    bool saw_header = false;
    for (auto line : detail::split_lines(text)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            data.provenance.emplace_back(body);
            continue;
        }
        if (!saw_header) {
            if (line != "sample,beta,mean_return")
                throw std::runtime_error("unexpected sweep CSV header: '" + std::string(line) +
                                         "'");
            saw_header = true;
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 3)
            throw std::runtime_error("sweep CSV row needs 3 fields: '" + std::string(line) + "'");
        SweepRow row;
        row.sample = detail::parse_int(f[0], "sample");
        row.beta = detail::parse_double(f[1], "beta");
        row.mean_return = detail::parse_double(f[2], "mean_return");
        data.rows.push_back(row);
    }
    if (!saw_header) throw std::runtime_error("sweep CSV has no header row");
    return data;
}

} // namespace epirl
