#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stimrec/errors.hpp"
#include "stimrec/experiments.hpp"
#include "stimrec/io.hpp"

namespace stimrec {

// One experiment's results over all subjects.
struct ExperimentResult {
    std::string experiment;  // "spectrogram" | "slope"
    ExperimentConfig config;
    std::vector<SubjectReport> subjects;
    double average_r = 0.0;  // across-subject mean of mean_r
};

struct Report {
    std::vector<ExperimentResult> results;
};

enum class ReportFormat { table, csv, json };

inline ReportFormat report_format_from_name(const std::string& name) {
    if (name == "table") return ReportFormat::table;
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw data_error("unknown report format: " + name);
}

namespace detail {

inline std::string fmt(const char* spec, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, value);
    return buf;
}

// Table 1 convention: tiny p-values render as "< 0.001", never stored that way.
inline std::string format_p(double p) {
    if (p < 1e-3) return "< 0.001";
    return fmt("%.3g", p);
}

}  // namespace detail

inline ordered_json config_to_json(const ExperimentConfig& config) {
    ordered_json j;
    j["target"] = target_name(config.target);
    j["smoothing_sigma"] = config.smoothing_sigma;
    j["lambda_grid"] = config.lambda_grid;
    j["lags"] = config.lags;
    j["seed"] = config.seed;
    j["bands"] = ordered_json::array();
    for (const auto& band : config.bands) j["bands"].push_back(band_to_json(band));
    j["window_len"] = config.geometry.window_len;
    j["hop"] = config.geometry.hop;
    j["analysis_rate_hz"] = config.analysis_rate_hz;
    j["filter_low_hz"] = config.filter_low_hz;
    j["filter_high_hz"] = config.filter_high_hz;
    return j;
}

inline ExperimentConfig config_from_json(const ordered_json& j) {
    ExperimentConfig config;
    config.target = target_from_name(j.at("target").get<std::string>());
    config.smoothing_sigma = j.at("smoothing_sigma").get<double>();
    config.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    config.lags = j.at("lags").get<std::size_t>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.bands.clear();
    for (const auto& band : j.at("bands")) config.bands.push_back(band_from_json(band));
    config.geometry.window_len = j.at("window_len").get<std::size_t>();
    config.geometry.hop = j.at("hop").get<std::size_t>();
    config.analysis_rate_hz = j.at("analysis_rate_hz").get<double>();
    config.filter_low_hz = j.at("filter_low_hz").get<double>();
    config.filter_high_hz = j.at("filter_high_hz").get<double>();
    return config;
}

inline ordered_json report_to_json(const Report& report) {
    ordered_json root;
    root["version"] = 1;
    root["results"] = ordered_json::array();
    for (const auto& result : report.results) {
        ordered_json jr;
        jr["experiment"] = result.experiment;
        jr["config"] = config_to_json(result.config);
        jr["subjects"] = ordered_json::array();
        for (const auto& subject : result.subjects) {
            ordered_json js;
            js["subject_id"] = subject.subject_id;
            js["per_trial"] = ordered_json::array();
            for (const auto& trial : subject.per_trial) {
                ordered_json jt;
                jt["trial_id"] = trial.trial_id;
                jt["r"] = trial.r;
                jt["p"] = trial.p;
                jt["lambda"] = trial.lambda;
                if (!trial.band_r.empty()) jt["band_r"] = trial.band_r;
                js["per_trial"].push_back(std::move(jt));
            }
            js["mean_r"] = subject.mean_r;
            js["fused_p"] = subject.fused_p;
            jr["subjects"].push_back(std::move(js));
        }
        jr["average_r"] = result.average_r;
        root["results"].push_back(std::move(jr));
    }
    return root;
}

inline Report report_from_json(const ordered_json& root) {
    try {
        Report report;
        for (const auto& jr : root.at("results")) {
            ExperimentResult result;
            result.experiment = jr.at("experiment").get<std::string>();
            result.config = config_from_json(jr.at("config"));
            for (const auto& js : jr.at("subjects")) {
                SubjectReport subject;
                subject.subject_id = js.at("subject_id").get<std::string>();
                for (const auto& jt : js.at("per_trial")) {
                    TrialScore trial;
                    trial.trial_id = jt.at("trial_id").get<std::string>();
                    trial.r = jt.at("r").get<double>();
                    trial.p = jt.at("p").get<double>();
                    trial.lambda = jt.at("lambda").get<double>();
                    if (jt.contains("band_r"))
                        trial.band_r = jt.at("band_r").get<std::vector<double>>();
                    subject.per_trial.push_back(std::move(trial));
                }
                subject.mean_r = js.at("mean_r").get<double>();
                subject.fused_p = js.at("fused_p").get<double>();
                result.subjects.push_back(std::move(subject));
            }
            result.average_r = jr.at("average_r").get<double>();
            report.results.push_back(std::move(result));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed report JSON: ") + e.what());
    }
}

// Runs one experiment over every subject and aggregates the across-subject
// average of mean r.
inline ExperimentResult run_experiment(const std::vector<TrialSet>& subjects,
                                       const ExperimentConfig& config) {
    if (subjects.empty()) throw data_error("run_experiment: no subjects");
    ExperimentResult result;
    result.experiment = target_name(config.target);
    result.config = config;
    double sum_r = 0.0;
    for (const auto& trialset : subjects) {
        result.subjects.push_back(run_subject(trialset, config));
        sum_r += result.subjects.back().mean_r;
    }
    result.average_r = sum_r / static_cast<double>(result.subjects.size());
    return result;
}

// Table layout mirrors the reference result table: one row per subject, one
// (r, p) column pair per experiment, and a final Average row of mean r.
inline std::string render_report(const Report& report, ReportFormat format) {
    if (report.results.empty()) throw data_error("render_report: empty report");

    if (format == ReportFormat::json) return report_to_json(report).dump(2) + "\n";

    if (format == ReportFormat::csv) {
        std::string out = "subject,experiment,mean_r,fused_p\n";
        for (const auto& result : report.results)
            for (const auto& subject : result.subjects)
                out += subject.subject_id + "," + result.experiment + "," +
                       detail::fmt("%.17g", subject.mean_r) + "," +
                       detail::fmt("%.17g", subject.fused_p) + "\n";
        return out;
    }

    // Column group title per experiment.
    auto group_title = [](const std::string& experiment) {
        if (experiment == "spectrogram") return std::string("Audio-Spectrogram");
        if (experiment == "slope") return std::string("Audio-Slope");
        return experiment;
    };

    // Union of subjects, in first-appearance order.
    std::vector<std::string> subject_ids;
    for (const auto& result : report.results)
        for (const auto& subject : result.subjects)
            if (std::find(subject_ids.begin(), subject_ids.end(), subject.subject_id) ==
                subject_ids.end())
                subject_ids.push_back(subject.subject_id);

    constexpr int kGroupWidth = 22;  // "r" and "p" sub-columns
    std::string out = "Subjects";
    out.append(12 - 8, ' ');
    for (const auto& result : report.results) {
        std::string title = group_title(result.experiment);
        title.resize(static_cast<std::size_t>(kGroupWidth), ' ');
        out += title;
    }
    out += "\n";
    out.append(12, ' ');
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        std::string sub = "r";
        sub.resize(11, ' ');
        sub += "p";
        sub.resize(static_cast<std::size_t>(kGroupWidth), ' ');
        out += sub;
    }
    out += "\n";

    auto cell = [&](const std::string& r_text, const std::string& p_text) {
        std::string c = r_text;
        c.resize(11, ' ');
        c += p_text;
        c.resize(static_cast<std::size_t>(kGroupWidth), ' ');
        return c;
    };

    for (const auto& id : subject_ids) {
        std::string row = id;
        row.resize(12, ' ');
        for (const auto& result : report.results) {
            const auto it = std::find_if(result.subjects.begin(), result.subjects.end(),
                                         [&](const SubjectReport& s) { return s.subject_id == id; });
            row += it == result.subjects.end()
                       ? cell("-", "-")
                       : cell(detail::fmt("%.3f", it->mean_r), detail::format_p(it->fused_p));
        }
        out += row + "\n";
    }

    std::string avg = "Average";
    avg.resize(12, ' ');
    for (const auto& result : report.results)
        avg += cell(detail::fmt("%.3f", result.average_r), "-");
    out += avg + "\n";
    return out;
}

}  // namespace stimrec
