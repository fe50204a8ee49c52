// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
//
// Acceptance suite: runs the six release criteria end to end and prints one
// PASS/FAIL line per criterion. Exits with the number of failures.
// Usage: acceptance <path-to-percephash-cli>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "percep/percep.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kCorpusSeed = 2;  // frozen; documented in the README
constexpr int kCorpusSubjects = 28;
constexpr int kCorpusWidth = 192;
constexpr int kCorpusHeight = 168;
constexpr double kBlurSigma = 2.0;

struct Failure {
    std::string detail;
};

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& msg) {
        if (ok) detail = msg;
        ok = false;
    }
    void require(bool cond, const std::string& msg) {
        if (!cond) fail(msg);
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

percep::GrayImage random_image(std::mt19937_64& rng, int w, int h, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    percep::GrayImage img(w, h);
    for (double& p : img.pixels) p = dist(rng);
    return img;
}

// Direct O(N^4) DCT-II oracle, independent of the separable implementation.
percep::CoeffMatrix dct2_reference(const percep::CoeffMatrix& m) {
    const int R = m.rows, C = m.cols;
    percep::CoeffMatrix out(R, C);
    for (int u = 0; u < R; ++u)
        for (int v = 0; v < C; ++v) {
            double acc = 0.0;
            for (int x = 0; x < R; ++x)
                for (int y = 0; y < C; ++y)
                    acc += m.at(x, y) *
                           std::cos(std::numbers::pi * (2 * x + 1) * u / (2.0 * R)) *
                           std::cos(std::numbers::pi * (2 * y + 1) * v / (2.0 * C));
            const double au = u == 0 ? std::sqrt(1.0 / R) : std::sqrt(2.0 / R);
            const double av = v == 0 ? std::sqrt(1.0 / C) : std::sqrt(2.0 / C);
            out.at(u, v) = au * av * acc;
        }
    return out;
}

// ---- criterion 1: DCT oracle equivalence -------------------------------

Check criterion_dct_oracle() {
    Check check;
    const auto start = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 200 && check.ok; ++trial) {
        percep::CoeffMatrix m(dim(rng), dim(rng));
        for (double& v : m.values) v = dist(rng);
        const percep::CoeffMatrix fast = percep::dct2(m);
        const percep::CoeffMatrix ref = dct2_reference(m);
        double in_energy = 0.0, out_energy = 0.0;
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            check.require(std::abs(fast.values[i] - ref.values[i]) <= 1e-9,
                          "fast dct2 deviates from the O(N^4) definition");
            in_energy += m.values[i] * m.values[i];
            out_energy += fast.values[i] * fast.values[i];
        }
        check.require(std::abs(in_energy - out_energy) <= 1e-9, "Parseval violated");
        const percep::CoeffMatrix back = percep::idct2(fast);
        for (std::size_t i = 0; i < m.values.size(); ++i)
            check.require(std::abs(back.values[i] - m.values[i]) <= 1e-9,
                          "idct2(dct2(m)) is not the identity");
    }
    check.require(seconds_since(start) < 5.0, "oracle comparison exceeded 5 s");
    return check;
}

// ---- criterion 2: hash invariance suite --------------------------------

Check criterion_hash_invariance() {
    Check check;
    std::mt19937_64 rng(102);
    for (int trial = 0; trial < 100 && check.ok; ++trial) {
        const percep::GrayImage img = random_image(rng, 64, 64, 0.0, 0.6);
        for (int bits : {32, 64}) {
            const percep::BitHash avg = percep::average_hash(img, bits);
            const percep::BitHash dct = percep::dct_hash(img, bits);
            check.require(std::popcount(dct.value) <= bits / 2,
                          "dct_hash popcount above bits/2");
            for (double a : {0.25, 0.5, 0.9}) {
                percep::GrayImage scaled = img;
                for (double& p : scaled.pixels) p *= a;
                check.require(percep::average_hash(scaled, bits).value == avg.value,
                              "average_hash not scale invariant");
                check.require(percep::dct_hash(scaled, bits).value == dct.value,
                              "dct_hash not scale invariant");
            }
            for (double b : {0.1, 0.39}) {
                percep::GrayImage shifted = img;
                for (double& p : shifted.pixels) p += b;
                check.require(percep::average_hash(shifted, bits).value == avg.value,
                              "average_hash not offset invariant");
            }
        }
    }
    return check;
}

// ---- criterion 3: metric and monotonicity properties -------------------

Check criterion_metric_monotone(const std::vector<percep::SweepResult>& results) {
    Check check;
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 1000 && check.ok; ++trial) {
        const percep::BitHash a{percep::HashKind::Average, 64, rng()};
        const percep::BitHash b{percep::HashKind::Average, 64, rng()};
        const percep::BitHash c{percep::HashKind::Average, 64, rng()};
        const int ab = percep::hamming(a, b);
        check.require(ab == percep::hamming(b, a), "hamming not symmetric");
        check.require((ab == 0) == (a.value == b.value), "hamming identity violated");
        check.require(percep::hamming(a, c) <= ab + percep::hamming(b, c),
                      "triangle inequality violated");
    }
    check.require(!results.empty(), "no sweep results to inspect");
    for (const percep::SweepResult& cell : results) {
        for (std::size_t i = 1; i < cell.rows.size(); ++i) {
            check.require(cell.rows[i].threshold > cell.rows[i - 1].threshold,
                          "thresholds not strictly increasing");
            check.require(cell.rows[i].accuracy >= cell.rows[i - 1].accuracy,
                          "accuracy not monotone");
            check.require(
                cell.rows[i].false_positive_rate >= cell.rows[i - 1].false_positive_rate,
                "false positive rate not monotone");
        }
        check.require(cell.rows.back().threshold == cell.config.bits,
                      "sweep does not reach threshold = bits");
        check.require(cell.rows.back().accuracy == 1.0, "accuracy(bits) != 1.0");
    }
    return check;
}

// ---- criterion 4: exactness anchors ------------------------------------

Check criterion_exactness(const fs::path& scratch) {
    Check check;
    std::mt19937_64 rng(104);

    // rot180 involution, down to the encoded bytes
    const fs::path a = scratch / "anchor_a.pgm";
    const fs::path b = scratch / "anchor_b.pgm";
    percep::write_pgm(random_image(rng, 95, 61, 0.0, 1.0), a);
    const percep::GrayImage original = percep::read_pgm(a);
    percep::write_pgm(percep::rotate(percep::rotate(original, 180.0), 180.0), b);
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    };
    check.require(slurp(a) == slurp(b), "rot180 involution broke the encoded bytes");

    // constant images are blur fixed points
    const percep::GrayImage flat(48, 48, 0.5);
    for (double p : percep::gaussian_blur(flat, kBlurSigma).pixels)
        check.require(std::abs(p - 0.5) <= 1e-12, "blur moved a constant image");

    // PGM round trip is lossless after quantization
    const fs::path c = scratch / "anchor_c.pgm";
    percep::write_pgm(percep::read_pgm(a), c);
    check.require(slurp(c) == slurp(a), "PGM round trip not lossless");

    // crop arithmetic
    const percep::GrayImage cropped =
        percep::center_crop(percep::GrayImage(640, 480, 0.3), 0.075);
    check.require(cropped.width == 544 && cropped.height == 408,
                  "crop:0.075 of 640x480 is not 544x408");
    return check;
}

// ---- criterion 5: trend checks on the frozen corpus ---------------------

int lowest_threshold_reaching(const percep::SweepResult& cell, double accuracy) {
    for (const percep::SweepRow& row : cell.rows)
        if (row.accuracy >= accuracy) return row.threshold;
    return cell.config.bits + 1;
}

const percep::SweepResult* find_cell(const std::vector<percep::SweepResult>& results,
                                     percep::AttackKind attack, percep::HashKind kind, int bits,
                                     percep::Variant variant) {
    for (const percep::SweepResult& cell : results)
        if (cell.attack.kind == attack && cell.config.kind == kind &&
            cell.config.bits == bits && percep::variant_of(cell.config) == variant)
            return &cell;
    return nullptr;
}

Check criterion_trends(const std::vector<percep::SweepResult>& results, double sweep_seconds) {
    Check check;
    const percep::AttackKind attacks[] = {percep::AttackKind::Annotate, percep::AttackKind::Crop,
                                          percep::AttackKind::Rotate180,
                                          percep::AttackKind::Rotate45};
    const percep::HashKind kinds[] = {percep::HashKind::Average, percep::HashKind::Dct};
    const percep::Variant variants[] = {percep::Variant::Baseline, percep::Variant::GB};

    // (a) 45-degree rotation stays near zero accuracy at tight thresholds
    for (percep::HashKind kind : kinds)
        for (int bits : {32, 64})
            for (percep::Variant variant : variants) {
                const auto* cell =
                    find_cell(results, percep::AttackKind::Rotate45, kind, bits, variant);
                check.require(cell != nullptr, "missing rot45 cell");
                if (cell == nullptr) continue;
                for (const percep::SweepRow& row : cell->rows)
                    if (row.threshold <= 10)
                        check.require(row.accuracy <= 0.05,
                                      "rot45 accuracy above 5% at threshold <= 10 (" +
                                          std::string(percep::kind_name(kind)) + ":" +
                                          std::to_string(bits) + ":" +
                                          percep::variant_name(variant) + ")");
            }

    // (b) annotation reaches 75% strictly earlier than every other attack
    for (percep::HashKind kind : kinds)
        for (int bits : {32, 64})
            for (percep::Variant variant : variants) {
                const auto* ann =
                    find_cell(results, percep::AttackKind::Annotate, kind, bits, variant);
                check.require(ann != nullptr, "missing annotate cell");
                if (ann == nullptr) continue;
                const int t_ann = lowest_threshold_reaching(*ann, 0.75);
                for (percep::AttackKind other :
                     {percep::AttackKind::Crop, percep::AttackKind::Rotate180,
                      percep::AttackKind::Rotate45}) {
                    const auto* cell = find_cell(results, other, kind, bits, variant);
                    if (cell == nullptr) continue;
                    const int t_other = lowest_threshold_reaching(*cell, 0.75);
                    check.require(t_ann < t_other,
                                  "annotate is not the easiest attack for " +
                                      std::string(percep::kind_name(kind)) + ":" +
                                      std::to_string(bits) + ":" +
                                      percep::variant_name(variant));
                }
            }

    // (c) the GB pipeline moves accuracy by at most 15 points anywhere
    for (percep::AttackKind attack : attacks)
        for (percep::HashKind kind : kinds)
            for (int bits : {32, 64}) {
                const auto* base =
                    find_cell(results, attack, kind, bits, percep::Variant::Baseline);
                const auto* gb = find_cell(results, attack, kind, bits, percep::Variant::GB);
                check.require(base != nullptr && gb != nullptr, "missing baseline/gb pair");
                if (base == nullptr || gb == nullptr) continue;
                double max_delta = 0.0;
                for (std::size_t i = 0; i < base->rows.size(); ++i)
                    max_delta = std::max(
                        max_delta, std::abs(gb->rows[i].accuracy - base->rows[i].accuracy));
                check.require(max_delta <= 0.15, "GB-vs-baseline delta above 15 points for " +
                                                     percep::to_string(base->attack));
                if (attack == percep::AttackKind::Crop)
                    std::printf("    crop cell %s:%d max |acc_gb - acc_baseline| = %.1f%%\n",
                                percep::kind_name(kind), bits, 100.0 * max_delta);
            }

    check.require(sweep_seconds < 60.0, "full sweep exceeded 60 s");
    return check;
}

// ---- criterion 6: end-to-end determinism --------------------------------

Check criterion_determinism(const std::string& cli, const fs::path& corpus,
                            const fs::path& scratch) {
    Check check;
    const fs::path csv1 = scratch / "sweep1.csv";
    const fs::path csv2 = scratch / "sweep2.csv";
    for (const fs::path& csv : {csv1, csv2}) {
        const std::string cmd = "'" + cli + "' sweep '" + corpus.string() + "' --out '" +
                                csv.string() + "' > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        check.require(status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0,
                      "cmd_sweep did not exit cleanly");
    }
    if (!check.ok) return check;
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    };
    const std::string bytes1 = slurp(csv1);
    check.require(!bytes1.empty(), "first sweep CSV is empty");
    check.require(bytes1 == slurp(csv2), "consecutive sweep runs differ");
    return check;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-percephash-cli>\n");
        return 64;
    }
    const std::string cli = argv[1];

    const fs::path scratch =
        fs::temp_directory_path() / ("percep_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(scratch);
    const fs::path corpus = scratch / "corpus";

    int failures = 0;
    const auto report = [&](int index, const char* name, const Check& check, double secs) {
        std::printf("[%d] %-34s %s (%.2f s)%s%s\n", index, name,
                    check.ok ? "PASS" : "FAIL", secs, check.ok ? "" : " - ",
                    check.ok ? "" : check.detail.c_str());
        if (!check.ok) ++failures;
    };

    {
        const auto t0 = Clock::now();
        report(1, "dct oracle equivalence", criterion_dct_oracle(), seconds_since(t0));
    }
    {
        const auto t0 = Clock::now();
        report(2, "hash invariance suite", criterion_hash_invariance(), seconds_since(t0));
    }

    // shared corpus + full sweep for criteria 3 and 5
    const auto t_sweep = Clock::now();
    const auto subjects =
        percep::generate_synthetic({kCorpusSubjects, kCorpusWidth, kCorpusHeight, kCorpusSeed},
                                   corpus);
    std::vector<percep::HashConfig> configs;
    for (percep::HashKind kind : {percep::HashKind::Average, percep::HashKind::Dct})
        for (int bits : {32, 64}) {
            configs.push_back({kind, bits, std::nullopt});
            configs.push_back({kind, bits, kBlurSigma});
        }
    const std::vector<percep::AttackSpec> attacks = {
        percep::AttackSpec::annotate(), percep::AttackSpec::crop(0.075),
        percep::AttackSpec::rotate180(), percep::AttackSpec::rotate45()};
    const auto results = percep::run_experiment(subjects, attacks, configs);
    const double sweep_seconds = seconds_since(t_sweep);

    {
        const auto t0 = Clock::now();
        report(3, "metric and monotonicity properties", criterion_metric_monotone(results),
               seconds_since(t0));
    }
    {
        const auto t0 = Clock::now();
        report(4, "exactness anchors", criterion_exactness(scratch), seconds_since(t0));
    }
    {
        std::printf("    corpus: %d subjects %dx%d seed %llu, full sweep %.2f s\n",
                    kCorpusSubjects, kCorpusWidth, kCorpusHeight,
                    static_cast<unsigned long long>(kCorpusSeed), sweep_seconds);
        report(5, "frozen-corpus trend checks", criterion_trends(results, sweep_seconds),
               sweep_seconds);
    }
    {
        const auto t0 = Clock::now();
        report(6, "end-to-end determinism", criterion_determinism(cli, corpus, scratch),
               seconds_since(t0));
    }

    std::error_code ec;
    fs::remove_all(scratch, ec);
    if (failures == 0) std::printf("all acceptance criteria passed\n");
    return failures;
}
