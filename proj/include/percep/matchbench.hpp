// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "percep/attacks.hpp"
#include "percep/dataset_io.hpp"
#include "percep/hashing.hpp"

namespace percep {

enum class Variant { Baseline, GB };

inline const char* variant_name(Variant v) {
    return v == Variant::Baseline ? "baseline" : "gb";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "baseline") return Variant::Baseline;
    if (s == "gb") return Variant::GB;
    throw std::invalid_argument("unknown variant: " + std::string(s));
}

inline Variant variant_of(const HashConfig& cfg) {
    return cfg.preblur_sigma ? Variant::GB : Variant::Baseline;
}

/// Registry of per-subject reference hashes.
///
/// Records are keyed by (subject, kind, bits, variant); the DB file carries
/// the variant flag rather than the blur sigma, so that tuple is the whole
/// identity of a record.
struct BaselineDB {
    struct Record {
        std::string subject_id;
        Variant variant = Variant::Baseline;
        BitHash hash;

        bool operator==(const Record&) const = default;
    };

    std::vector<Record> records;

    void add(std::string subject_id, Variant variant, const BitHash& hash) {
        for (const Record& r : records)
            if (r.subject_id == subject_id && r.variant == variant &&
                r.hash.kind == hash.kind && r.hash.bits == hash.bits)
                throw std::invalid_argument("BaselineDB: duplicate record for subject '" +
                                            subject_id + "'");
        records.push_back({std::move(subject_id), variant, hash});
    }

    /// Records matching a config's (kind, bits, variant), in insertion order.
    std::vector<const Record*> under(const HashConfig& cfg) const {
        const Variant v = variant_of(cfg);
        std::vector<const Record*> out;
        for (const Record& r : records)
            if (r.variant == v && r.hash.kind == cfg.kind && r.hash.bits == cfg.bits)
                out.push_back(&r);
        return out;
    }

    const Record* find(std::string_view subject_id, const HashConfig& cfg) const {
        const Variant v = variant_of(cfg);
        for (const Record& r : records)
            if (r.variant == v && r.hash.kind == cfg.kind && r.hash.bits == cfg.bits &&
                r.subject_id == subject_id)
                return &r;
        return nullptr;
    }

    bool operator==(const BaselineDB& other) const {
        auto key = [](const Record& r) {
            return std::tuple(r.subject_id, r.variant, r.hash.kind, r.hash.bits, r.hash.value);
        };
        auto a = records, b = other.records;
        auto by_key = [&](const Record& x, const Record& y) { return key(x) < key(y); };
        std::sort(a.begin(), a.end(), by_key);
        std::sort(b.begin(), b.end(), by_key);
        return a == b;
    }
};

/// Subjects whose stored hash lies within `threshold` of `h` (possibly many).
inline std::vector<std::string> match(const BitHash& h, const BaselineDB& db,
                                      const HashConfig& cfg, int threshold) {
    const auto candidates = db.under(cfg);
    if (candidates.empty())
        throw std::invalid_argument("match: no baseline records for this config");
    if (threshold < 0 || threshold > cfg.bits)
        throw std::invalid_argument("match: threshold out of range");
    std::vector<std::string> hits;
    for (const BaselineDB::Record* r : candidates)
        if (hamming(h, r->hash) <= threshold) hits.push_back(r->subject_id);
    std::sort(hits.begin(), hits.end());
    return hits;
}

struct TestHash {
    std::string subject_id;
    BitHash hash;
};

struct AccuracyStats {
    double accuracy = 0.0;
    double false_positive_rate = 0.0;
};

/// Threshold-membership scoring of a test set against its baselines.
///
/// accuracy = share of tests within `threshold` of their own subject's
/// record; the false-positive rate counts (test, other-subject) pairs within
/// the threshold over all such cross pairs.
inline AccuracyStats accuracy_at(const std::vector<TestHash>& tests, const BaselineDB& db,
                                 const HashConfig& cfg, int threshold) {
    const auto candidates = db.under(cfg);
    if (candidates.empty())
        throw std::invalid_argument("accuracy_at: no baseline records for this config");
    if (threshold < 0 || threshold > cfg.bits)
        throw std::invalid_argument("accuracy_at: threshold out of range");
    long hits = 0;
    long false_positives = 0;
    for (const TestHash& t : tests) {
        const BaselineDB::Record* own = db.find(t.subject_id, cfg);
        if (own == nullptr)
            throw std::invalid_argument("accuracy_at: unknown subject '" + t.subject_id + "'");
        if (hamming(t.hash, own->hash) <= threshold) ++hits;
        for (const BaselineDB::Record* r : candidates)
            if (r != own && hamming(t.hash, r->hash) <= threshold) ++false_positives;
    }
    AccuracyStats stats;
    if (!tests.empty()) {
        stats.accuracy = static_cast<double>(hits) / static_cast<double>(tests.size());
        const auto cross_pairs = static_cast<double>(tests.size()) *
                                 static_cast<double>(candidates.size() - 1);
        stats.false_positive_rate =
            cross_pairs > 0 ? static_cast<double>(false_positives) / cross_pairs : 0.0;
    }
    return stats;
}

struct SweepRow {
    int threshold = 0;
    double accuracy = 0.0;
    double false_positive_rate = 0.0;
};

/// Accuracy/false-positive curve of one (attack, config) cell.
struct SweepResult {
    AttackSpec attack;
    HashConfig config;
    std::vector<SweepRow> rows;  // strictly increasing thresholds
};

inline SweepResult sweep(const std::vector<TestHash>& tests, const BaselineDB& db,
                         const HashConfig& cfg, int threshold_lo, int threshold_hi) {
    if (threshold_lo < 0 || threshold_hi > cfg.bits || threshold_lo > threshold_hi)
        throw std::invalid_argument("sweep: threshold range out of bounds");
    SweepResult result;
    result.config = cfg;
    result.rows.reserve(static_cast<std::size_t>(threshold_hi - threshold_lo + 1));
    for (int t = threshold_lo; t <= threshold_hi; ++t) {
        const AccuracyStats stats = accuracy_at(tests, db, cfg, t);
        result.rows.push_back({t, stats.accuracy, stats.false_positive_rate});
    }
    return result;
}

/// Inclusive threshold range; hi < 0 means "up to the hash width".
struct ThresholdRange {
    int lo = 0;
    int hi = -1;

    std::pair<int, int> resolve(int bits) const {
        const int l = std::clamp(lo, 0, bits);
        const int h = hi < 0 ? bits : std::clamp(hi, l, bits);
        return {l, h};
    }
};

struct ExperimentOptions {
    // When set, attacked test images are hashed without the pre-blur even
    // under GB configs (blur then applies to baselines only).
    bool gb_asymmetric = false;
};

/// Full benchmark: baseline DBs per config, then one sweep per
/// (attack, config) cell, attacks outermost. Attacked pixels are computed
/// once per attack and shared by every config, so baseline/GB cells differ
/// only in the pre-hash blur.
inline std::vector<SweepResult> run_experiment(const std::vector<SubjectImage>& subjects,
                                               const std::vector<AttackSpec>& attacks,
                                               const std::vector<HashConfig>& configs,
                                               ThresholdRange thresholds = {},
                                               const ExperimentOptions& options = {}) {
    BaselineDB db;
    for (const HashConfig& cfg : configs)
        for (const SubjectImage& s : subjects)
            db.add(s.subject_id, variant_of(cfg), hash_with_config(s.image, cfg));

    std::vector<SweepResult> results;
    results.reserve(attacks.size() * configs.size());
    for (const AttackSpec& attack : attacks) {
        std::vector<SubjectImage> attacked;
        attacked.reserve(subjects.size());
        for (const SubjectImage& s : subjects)
            attacked.push_back({s.subject_id, apply_attack(s.image, attack), s.source_path});
        for (const HashConfig& cfg : configs) {
            const bool blur_tests = !options.gb_asymmetric;
            std::vector<TestHash> tests;
            tests.reserve(attacked.size());
            for (const SubjectImage& s : attacked) {
                const BitHash h = blur_tests ? hash_with_config(s.image, cfg)
                                  : cfg.kind == HashKind::Average
                                      ? average_hash(s.image, cfg.bits)
                                      : dct_hash(s.image, cfg.bits);
                tests.push_back({s.subject_id, h});
            }
            const auto [lo, hi] = thresholds.resolve(cfg.bits);
            SweepResult cell = sweep(tests, db, cfg, lo, hi);
            cell.attack = attack;
            results.push_back(std::move(cell));
        }
    }
    return results;
}

inline std::vector<SweepResult> run_experiment(const std::filesystem::path& dataset_dir,
                                               const std::vector<AttackSpec>& attacks,
                                               const std::vector<HashConfig>& configs,
                                               ThresholdRange thresholds = {},
                                               const ExperimentOptions& options = {}) {
    return run_experiment(load_dataset(dataset_dir), attacks, configs, thresholds, options);
}

/// Plot-ready CSV, one row per threshold, 6-decimal rates.
inline void write_csv(std::ostream& out, const std::vector<SweepResult>& results) {
    out << "attack,hash_kind,bits,variant,threshold,accuracy,false_positive_rate\n";
    char buf[64];
    for (const SweepResult& cell : results) {
        const std::string attack = to_string(cell.attack);
        const char* kind = kind_name(cell.config.kind);
        const char* variant = variant_name(variant_of(cell.config));
        for (const SweepRow& row : cell.rows) {
            std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f", row.threshold, row.accuracy,
                          row.false_positive_rate);
            out << attack << ',' << kind << ',' << cell.config.bits << ',' << variant << ','
                << buf << '\n';
        }
    }
}

/// Malformed baseline-DB file; the message carries path and line number.
struct DbParseError : std::runtime_error {
    DbParseError(const std::filesystem::path& path, int line, const std::string& what)
        : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what),
          line_number(line) {}

    int line_number;
};

inline constexpr std::string_view kDbHeader = "# percep-hash-db v1";

/// Write a DB as `subject<TAB>variant<TAB>kind:bits:hex` lines after the
/// version header, canonically sorted, LF endings.
inline void save_db(const BaselineDB& db, const std::filesystem::path& path) {
    auto records = db.records;
    std::sort(records.begin(), records.end(),
              [](const BaselineDB::Record& a, const BaselineDB::Record& b) {
                  return std::tuple(a.subject_id, a.variant, a.hash.kind, a.hash.bits) <
                         std::tuple(b.subject_id, b.variant, b.hash.kind, b.hash.bits);
              });
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DbParseError(path, 0, "cannot open file for writing");
    out << kDbHeader << '\n';
    for (const BaselineDB::Record& r : records)
        out << r.subject_id << '\t' << variant_name(r.variant) << '\t' << to_string(r.hash)
            << '\n';
    if (!out)
        throw DbParseError(path, 0, "write failed");
}

inline BaselineDB load_db(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DbParseError(path, 0, "cannot open file");
    std::string line;
    int line_number = 0;
    BaselineDB db;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_number == 1) {
            if (line != kDbHeader)
                throw DbParseError(path, 1, "missing '" + std::string(kDbHeader) + "' header");
            continue;
        }
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = (t1 == std::string::npos) ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw DbParseError(path, line_number, "expected three tab-separated fields");
        try {
            db.add(line.substr(0, t1), parse_variant(line.substr(t1 + 1, t2 - t1 - 1)),
                   parse_hash(std::string_view(line).substr(t2 + 1)));
        } catch (const std::invalid_argument& e) {
            throw DbParseError(path, line_number, e.what());
        }
    }
    return db;
}

}  // namespace percep
