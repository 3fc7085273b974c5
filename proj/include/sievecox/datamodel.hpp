#pragma once
// Trial data model: per-subject records carrying arm, covariates, stratum,
// follow-up time, event status and the per-endpoint sequence summary
// (K mismatched reads out of depth M), plus ingestion validation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sievecox/errors.hpp"

namespace sievecox {

struct SubjectRecord {
    std::string id;
    int arm = 0;          // 0 placebo, 1 vaccine
    int stratum = 0;      // dense internal index; original labels kept on Dataset
    double time = 0.0;    // min(event time, censoring time), > 0
    bool event = false;
    bool sequenced = false;   // sequence summary available (only meaningful for events)
    long long k = -1;         // mismatched sequences; valid iff event && sequenced
    long long m = -1;         // sequencing depth;     valid iff event && sequenced
    std::vector<double> x;    // adjustment covariates
    std::vector<double> aux;  // auxiliary covariates (missingness modeling)

    bool has_marks() const { return event && sequenced; }
};

struct Dataset {
    std::vector<SubjectRecord> records;
    std::vector<std::string> covariate_names;
    std::vector<std::string> aux_names;
    std::vector<long long> stratum_labels;  // original label per dense index

    std::size_t size() const { return records.size(); }
    int p() const { return int(covariate_names.size()); }
    int n_strata() const { return int(stratum_labels.size()); }

    std::size_t count_events() const {
        std::size_t c = 0;
        for (const auto& r : records) c += r.event;
        return c;
    }
    std::size_t count_sequenced_endpoints() const {
        std::size_t c = 0;
        for (const auto& r : records) c += r.has_marks();
        return c;
    }
};

// Collapses one endpoint's per-sequence binary marks into (K, M).
inline std::pair<long long, long long> aggregate_sequences(
    std::span<const int> marks) {
    if (marks.empty())
        throw Error(ErrorCode::EmptySequenceSet,
                    "no sequences to aggregate for endpoint");
    long long k = 0;
    for (int v : marks) {
        if (v != 0 && v != 1)
            throw Error(ErrorCode::DomainError,
                        "sequence mark must be 0 or 1");
        k += v;
    }
    return {k, (long long)marks.size()};
}

// Bin layout over (0,1): interior cutpoints split [0,1] into l bins.
// Lower bins are left-open/right-closed; the top bin is closed at its left
// edge so that a proportion exactly equal to the top cutpoint is "high".
struct ThresholdSpec {
    std::vector<double> cuts;  // q_0 = 0 < q_1 < ... < q_l = 1

    static ThresholdSpec binary(double q0) { return from_interior({q0}); }

    static ThresholdSpec from_interior(std::vector<double> interior) {
        if (interior.empty())
            throw Error(ErrorCode::DomainError,
                        "threshold spec needs at least one interior cutpoint");
        ThresholdSpec spec;
        spec.cuts.push_back(0.0);
        for (double c : interior) spec.cuts.push_back(c);
        spec.cuts.push_back(1.0);
        for (std::size_t i = 0; i + 1 < spec.cuts.size(); ++i)
            if (!(spec.cuts[i] < spec.cuts[i + 1]))
                throw Error(ErrorCode::DomainError,
                            "threshold cutpoints must be strictly increasing");
        for (double c : interior)
            if (!(c > 0.0 && c < 1.0))
                throw Error(ErrorCode::DomainError,
                            "interior cutpoints must lie in (0,1)");
        return spec;
    }

    int n_bins() const { return int(cuts.size()) - 1; }

    int bin_of(double q) const {
        const int l = n_bins();
        if (q >= cuts[l - 1]) return l - 1;
        for (int j = 1; j < l; ++j)
            if (q <= cuts[j]) return j - 1;
        return l - 1;  // unreachable for q in [0,1]
    }
};

// ---------------------------------------------------------------------------
// Ingestion

// One parsed tabular row before semantic validation.
struct RawRow {
    std::size_t line = 0;  // 1-based source line for diagnostics
    std::string id;
    std::optional<long long> arm;
    std::optional<long long> stratum;
    std::optional<double> time;
    std::optional<long long> event;
    std::optional<long long> k;
    std::optional<long long> m;
    std::optional<long long> sequenced;
    std::vector<std::optional<double>> x;
    std::vector<std::optional<double>> aux;
};

struct ValidationIssue {
    std::size_t line = 0;
    std::string id;
    std::string message;

    std::string format() const {
        std::ostringstream ss;
        ss << "row " << line;
        if (!id.empty()) ss << " (id=" << id << ")";
        ss << ": " << message;
        return ss.str();
    }
};

struct ValidationResult {
    Dataset dataset;
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

// Checks every row against the record invariants and assembles a Dataset.
// All violations are reported, not just the first; acceptance is
// order-independent and strata are relabeled to dense indices.
inline ValidationResult validate_dataset(
    const std::vector<RawRow>& rows,
    std::vector<std::string> covariate_names = {},
    std::vector<std::string> aux_names = {}) {
    ValidationResult out;
    if (rows.empty()) {
        out.issues.push_back({0, "", "dataset is empty"});
        return out;
    }
    const std::size_t p = covariate_names.empty() && !rows.empty()
                              ? rows.front().x.size()
                              : covariate_names.size();
    if (covariate_names.empty())
        for (std::size_t j = 0; j < p; ++j)
            covariate_names.push_back("x" + std::to_string(j + 1));
    const std::size_t q = aux_names.empty() ? rows.front().aux.size()
                                            : aux_names.size();
    if (aux_names.empty())
        for (std::size_t j = 0; j < q; ++j)
            aux_names.push_back("a" + std::to_string(j + 1));

    std::map<long long, int> stratum_index;
    std::vector<SubjectRecord> records;
    records.reserve(rows.size());

    for (const auto& row : rows) {
        auto issue = [&](const std::string& msg) {
            out.issues.push_back({row.line, row.id, msg});
        };
        bool row_ok = true;
        SubjectRecord rec;
        rec.id = row.id;
        if (row.id.empty()) {
            issue("missing id");
            row_ok = false;
        }
        if (!row.arm || (*row.arm != 0 && *row.arm != 1)) {
            issue("unknown arm code (expected 0 or 1)");
            row_ok = false;
        } else {
            rec.arm = int(*row.arm);
        }
        if (!row.stratum) {
            issue("missing stratum");
            row_ok = false;
        }
        if (!row.time || !(*row.time > 0.0)) {
            issue("nonpositive time");
            row_ok = false;
        } else {
            rec.time = *row.time;
        }
        if (!row.event || (*row.event != 0 && *row.event != 1)) {
            issue("event flag must be 0 or 1");
            row_ok = false;
        } else {
            rec.event = *row.event == 1;
        }
        const bool seq = row.sequenced.value_or(0) == 1;
        if (row.sequenced && *row.sequenced != 0 && *row.sequenced != 1) {
            issue("sequenced flag must be 0, 1 or empty");
            row_ok = false;
        }
        rec.sequenced = seq;
        if (rec.event && seq) {
            if (!row.k || !row.m) {
                issue("missing (k, m) for a sequenced endpoint");
                row_ok = false;
            } else if (*row.k < 0 || *row.m < 0) {
                issue("negative k or m");
                row_ok = false;
            } else if (*row.k > *row.m) {
                issue("K exceeds M");
                row_ok = false;
            } else {
                rec.k = *row.k;
                rec.m = *row.m;
            }
        } else if (row.k || row.m) {
            issue(rec.event ? "k/m present but sequenced flag is not 1"
                            : "k/m present for a non-event");
            row_ok = false;
        }
        if (row.x.size() != p) {
            issue("covariate count differs from header");
            row_ok = false;
        } else {
            for (std::size_t j = 0; j < p; ++j) {
                if (!row.x[j]) {
                    issue("missing covariate " + covariate_names[j]);
                    row_ok = false;
                } else {
                    rec.x.push_back(*row.x[j]);
                }
            }
        }
        if (row.aux.size() != q) {
            issue("auxiliary covariate count differs from header");
            row_ok = false;
        } else {
            for (std::size_t j = 0; j < q; ++j) {
                if (!row.aux[j]) {
                    issue("missing auxiliary covariate " + aux_names[j]);
                    row_ok = false;
                } else {
                    rec.aux.push_back(*row.aux[j]);
                }
            }
        }
        if (row_ok && row.stratum) {
            auto [it, inserted] =
                stratum_index.try_emplace(*row.stratum, int(stratum_index.size()));
            rec.stratum = it->second;
            records.push_back(std::move(rec));
        }
    }

    if (!out.issues.empty()) return out;
    out.dataset.records = std::move(records);
    out.dataset.covariate_names = std::move(covariate_names);
    out.dataset.aux_names = std::move(aux_names);
    out.dataset.stratum_labels.resize(stratum_index.size());
    for (const auto& [label, idx] : stratum_index)
        out.dataset.stratum_labels[std::size_t(idx)] = label;
    return out;
}

}  // namespace sievecox
