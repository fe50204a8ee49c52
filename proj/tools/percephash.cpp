// Copyright percep-hash contributors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
//
// percephash: one binary for the whole pipeline. `gen` emits the synthetic
// corpus, `hash`/`attack` expose the primitives, `baseline` persists the
// reference hashes, and `sweep` writes the threshold/accuracy CSV.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "percep/percep.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::vector<percep::HashKind> parse_kinds(const std::string& csv) {
    std::vector<percep::HashKind> kinds;
    for (const std::string& item : split_list(csv)) kinds.push_back(percep::parse_kind(item));
    return kinds;
}

std::vector<int> parse_bits_list(const std::string& csv) {
    std::vector<int> bits;
    for (const std::string& item : split_list(csv)) {
        if (item == "32") bits.push_back(32);
        else if (item == "64") bits.push_back(64);
        else throw std::invalid_argument("hash width must be 32 or 64, got '" + item + "'");
    }
    return bits;
}

std::vector<percep::AttackSpec> parse_attacks(const std::string& csv) {
    std::vector<percep::AttackSpec> attacks;
    for (const std::string& item : split_list(csv)) attacks.push_back(percep::parse_attack(item));
    return attacks;
}

percep::ThresholdRange parse_thresholds(const std::string& s) {
    if (s.empty()) return {};
    const std::size_t dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const int t = std::stoi(s);
            return {t, t};
        }
        return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed threshold range '" + s + "' (want a..b)");
    }
}

std::pair<int, int> parse_size(const std::string& s) {
    int w = 0, h = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%dx%d%c", &w, &h, &tail) != 2 || w < 1 || h < 1)
        throw std::invalid_argument("malformed size '" + s + "' (want WxH)");
    return {w, h};
}

// kind-major, then width, then baseline/gb: the column order of the CSV.
std::vector<percep::HashConfig> config_grid(const std::vector<percep::HashKind>& kinds,
                                            const std::vector<int>& bits_list, double sigma) {
    std::vector<percep::HashConfig> configs;
    for (percep::HashKind kind : kinds)
        for (int bits : bits_list) {
            configs.push_back({kind, bits, std::nullopt});
            configs.push_back({kind, bits, sigma});
        }
    return configs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perceptual image hashing and duplicate-detection benchmark"};
    app.require_subcommand(1);

    // hash
    std::string hash_image, hash_kind = "avg";
    int hash_bits = 64;
    double hash_sigma = 0.0;
    auto* cmd_hash = app.add_subcommand("hash", "print the canonical hash of one image");
    cmd_hash->add_option("image", hash_image, "input PGM")->required();
    cmd_hash->add_option("--kind", hash_kind, "hash kind: avg or dct")->capture_default_str();
    cmd_hash->add_option("--bits", hash_bits, "hash width: 32 or 64")->capture_default_str();
    auto* hash_sigma_opt = cmd_hash->add_option(
        "--blur-sigma", hash_sigma, "Gaussian pre-blur sigma (omit for no blur)");

    // attack
    std::string attack_image, attack_spec, attack_out;
    auto* cmd_attack = app.add_subcommand("attack", "apply one adversarial transform");
    cmd_attack->add_option("image", attack_image, "input PGM")->required();
    cmd_attack
        ->add_option("--attack", attack_spec,
                     "annotate | crop:<fraction-per-side> | rot180 | rot45 | rot:<degrees> "
                     "(annotate text \"COPYRIGHTED\", crop default 0.075)")
        ->required();
    cmd_attack->add_option("--out", attack_out, "output PGM path")->required();

    // baseline
    std::string base_dataset, base_out, base_kinds = "avg,dct", base_bits = "32,64";
    double base_sigma = 2.0;
    auto* cmd_baseline =
        app.add_subcommand("baseline", "hash a dataset into a baseline DB (baseline + gb)");
    cmd_baseline->add_option("dataset", base_dataset, "directory of per-subject PGMs")->required();
    cmd_baseline->add_option("--out", base_out, "output DB path")->required();
    cmd_baseline->add_option("--kinds", base_kinds, "comma list of hash kinds")->capture_default_str();
    cmd_baseline->add_option("--bits-list", base_bits, "comma list of hash widths")->capture_default_str();
    cmd_baseline->add_option("--blur-sigma", base_sigma, "sigma of the gb variant")->capture_default_str();

    // sweep
    std::string sweep_dataset, sweep_out, sweep_thresholds;
    std::string sweep_attacks = "annotate,crop:0.075,rot180,rot45";
    std::string sweep_kinds = "avg,dct", sweep_bits = "32,64";
    double sweep_sigma = 2.0;
    bool gb_asymmetric = false;
    auto* cmd_sweep = app.add_subcommand("sweep", "run the full threshold sweep and write CSV");
    cmd_sweep->add_option("dataset", sweep_dataset, "directory of per-subject PGMs")->required();
    cmd_sweep->add_option("--attacks", sweep_attacks, "comma list of attack specs")->capture_default_str();
    cmd_sweep->add_option("--kinds", sweep_kinds, "comma list of hash kinds")->capture_default_str();
    cmd_sweep->add_option("--bits-list", sweep_bits, "comma list of hash widths")->capture_default_str();
    cmd_sweep->add_option("--blur-sigma", sweep_sigma, "sigma of the gb variant")->capture_default_str();
    cmd_sweep->add_option("--thresholds", sweep_thresholds,
                          "threshold range a..b (default 0..bits per config)");
    cmd_sweep->add_flag("--gb-asymmetric", gb_asymmetric,
                        "blur baselines only; hash attacked images unblurred");
    cmd_sweep->add_option("--out", sweep_out, "output CSV path")->required();

    // gen
    std::string gen_size = "192x168", gen_out;
    int gen_subjects = 28;
    std::uint64_t gen_seed = 2;
    auto* cmd_gen = app.add_subcommand("gen", "write the deterministic synthetic corpus");
    cmd_gen->add_option("--subjects", gen_subjects, "number of subjects")->capture_default_str();
    cmd_gen->add_option("--size", gen_size, "image size WxH")->capture_default_str();
    cmd_gen->add_option("--seed", gen_seed, "corpus seed")->capture_default_str();
    cmd_gen->add_option("--out", gen_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_hash->parsed()) {
            percep::HashConfig cfg{percep::parse_kind(hash_kind), hash_bits, std::nullopt};
            if (hash_sigma_opt->count() > 0) cfg.preblur_sigma = hash_sigma;
            const percep::BitHash h = percep::hash_with_config(percep::read_pgm(hash_image), cfg);
            std::cout << hash_image << '\t' << percep::to_string(h) << '\n';
        } else if (cmd_attack->parsed()) {
            const percep::AttackSpec spec = percep::parse_attack(attack_spec);
            percep::write_pgm(percep::apply_attack(percep::read_pgm(attack_image), spec),
                              attack_out);
        } else if (cmd_baseline->parsed()) {
            const auto subjects = percep::load_dataset(base_dataset);
            percep::BaselineDB db;
            for (const percep::HashConfig& cfg :
                 config_grid(parse_kinds(base_kinds), parse_bits_list(base_bits), base_sigma))
                for (const percep::SubjectImage& s : subjects)
                    db.add(s.subject_id, percep::variant_of(cfg),
                           percep::hash_with_config(s.image, cfg));
            percep::save_db(db, base_out);
        } else if (cmd_sweep->parsed()) {
            const auto results = percep::run_experiment(
                std::filesystem::path(sweep_dataset), parse_attacks(sweep_attacks),
                config_grid(parse_kinds(sweep_kinds), parse_bits_list(sweep_bits), sweep_sigma),
                parse_thresholds(sweep_thresholds), {.gb_asymmetric = gb_asymmetric});
            std::ofstream out(sweep_out, std::ios::binary | std::ios::trunc);
            if (!out) throw std::invalid_argument("cannot open output CSV: " + sweep_out);
            percep::write_csv(out, results);
            if (!out) throw std::runtime_error("failed writing CSV: " + sweep_out);
        } else if (cmd_gen->parsed()) {
            const auto [w, h] = parse_size(gen_size);
            percep::generate_synthetic({gen_subjects, w, h, gen_seed}, gen_out);
        }
        return 0;
    } catch (const percep::PgmError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const percep::DatasetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const percep::DbParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
