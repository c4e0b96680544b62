#include "chaostune/csv.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "chaostune/error.hpp"
#include "chaostune/text.hpp"

namespace chaostune {

namespace {

using Fields = std::vector<std::string_view>;

/// Calls `on_row(fields, line_no)` for every data line after checking the header.
void for_each_row(std::string_view text, std::string_view header, std::size_t width,
                  const std::function<void(const Fields&, std::size_t)>& on_row) {
    std::size_t line_no = 0;
    bool seen_header = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (pos > text.size()) break;
            continue;
        }
        if (!seen_header) {
            if (line != header) {
                throw Error(ErrorCode::ParseFailure, "line " + std::to_string(line_no) + ": expected header '" +
                                                         std::string(header) + "'");
            }
            seen_header = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != width) {
            throw Error(ErrorCode::ParseFailure, "line " + std::to_string(line_no) + ": expected " +
                                                     std::to_string(width) + " fields, got " +
                                                     std::to_string(fields.size()));
        }
        try {
            on_row(fields, line_no);
        } catch (const Error& e) {
            throw Error(ErrorCode::ParseFailure, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!seen_header) throw Error(ErrorCode::ParseFailure, "line 1: missing header");
}

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string opt_count(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

std::optional<double> parse_opt_number(std::string_view f) {
    if (trim(f).empty()) return std::nullopt;
    return parse_double(f);
}

std::optional<std::size_t> parse_opt_count(std::string_view f) {
    if (trim(f).empty()) return std::nullopt;
    const auto v = parse_int(f);
    if (v < 0) throw Error(ErrorCode::ParseFailure, "negative count");
    return static_cast<std::size_t>(v);
}

template <typename... T>
void write_row(std::string& out, const T&... fields) {
    bool first = true;
    ((out += (first ? "" : ","), out += fields, first = false), ...);
    out += '\n';
}

}  // namespace

std::string dataset_to_csv(const Dataset& ds) {
    std::string out(kDatasetHeader);
    out += '\n';
    for (const auto& r : ds.records) {
        write_row(out, format_double(r.t), format_double(r.x), format_double(r.v), format_double(r.u),
                  format_double(r.s1), format_double(r.s2), format_double(r.err));
    }
    return out;
}

Dataset dataset_from_csv(std::string_view text) {
    Dataset ds;
    for_each_row(text, kDatasetHeader, 7, [&](const Fields& f, std::size_t) {
        ds.records.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                              parse_double(f[4]), parse_double(f[5]), parse_double(f[6])});
    });
    return ds;
}

std::string trajectory_to_csv(const Trajectory& tr) {
    std::string out(kTrajectoryHeader);
    out += '\n';
    for (std::size_t i = 0; i < tr.rows.size(); ++i) {
        const auto& r = tr.rows[i];
        const bool last = i + 1 == tr.rows.size();
        const RunStatus st = last ? tr.status : RunStatus::Running;
        write_row(out, format_double(r.t), format_double(r.x), format_double(r.v), format_double(r.u),
                  format_double(r.qd), format_double(r.e), format_double(r.V), format_double(r.s1),
                  format_double(r.s2), std::string(to_string(st)));
    }
    return out;
}

Trajectory trajectory_from_csv(std::string_view text) {
    Trajectory tr;
    for_each_row(text, kTrajectoryHeader, 10, [&](const Fields& f, std::size_t) {
        if (tr.status != RunStatus::Running) throw Error(ErrorCode::ParseFailure, "row after final status");
        tr.rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                           parse_double(f[4]), parse_double(f[5]), parse_double(f[6]), parse_double(f[7]),
                           parse_double(f[8])});
        tr.status = parse_run_status(trim(f[9]));
    });
    if (tr.status == RunStatus::Diverged) tr.divergence_time = tr.rows.back().t;
    return tr;
}

std::string event_log_to_csv(const EventLog& log) {
    std::string out(kEventLogHeader);
    out += '\n';
    for (const auto& r : log) {
        write_row(out, format_double(r.t), std::string(to_string(r.kind)), format_double(r.s1), format_double(r.s2),
                  opt_number(r.predicted_err), opt_number(r.measured_err), opt_count(r.attempts),
                  opt_count(r.memo_size), opt_count(r.new_data_size), opt_number(r.post_rmse));
    }
    return out;
}

EventLog event_log_from_csv(std::string_view text) {
    EventLog log;
    for_each_row(text, kEventLogHeader, 10, [&](const Fields& f, std::size_t) {
        EventLogRow r;
        r.t = parse_double(f[0]);
        r.kind = parse_event_kind(trim(f[1]));
        r.s1 = parse_double(f[2]);
        r.s2 = parse_double(f[3]);
        r.predicted_err = parse_opt_number(f[4]);
        r.measured_err = parse_opt_number(f[5]);
        r.attempts = parse_opt_count(f[6]);
        r.memo_size = parse_opt_count(f[7]);
        r.new_data_size = parse_opt_count(f[8]);
        r.post_rmse = parse_opt_number(f[9]);
        log.push_back(r);
    });
    return log;
}

std::string train_log_to_csv(const TrainLog& log) {
    std::string out(kTrainLogHeader);
    out += '\n';
    for (const auto& r : log) {
        write_row(out, std::to_string(r.epoch), format_double(r.lr), format_double(r.train_rmse),
                  format_double(r.test_rmse), std::to_string(r.batch_size));
    }
    return out;
}

TrainLog train_log_from_csv(std::string_view text) {
    TrainLog log;
    for_each_row(text, kTrainLogHeader, 5, [&](const Fields& f, std::size_t) {
        log.push_back({static_cast<int>(parse_int(f[0])), parse_double(f[1]), parse_double(f[2]),
                       parse_double(f[3]), static_cast<std::size_t>(parse_int(f[4]))});
    });
    return log;
}

std::string predictions_to_csv(const std::vector<PredictionPair>& rows) {
    std::string out(kPredictionsHeader);
    out += '\n';
    for (const auto& r : rows) write_row(out, format_double(r.prediction), format_double(r.target));
    return out;
}

std::vector<PredictionPair> predictions_from_csv(std::string_view text) {
    std::vector<PredictionPair> rows;
    for_each_row(text, kPredictionsHeader, 2,
                 [&](const Fields& f, std::size_t) { rows.push_back({parse_double(f[0]), parse_double(f[1])}); });
    return rows;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace chaostune
