// echolab command line front end: subshift input generation and
// validation, attractor atlases, echo-index estimation, pullback tests,
// funneling horizons and (m0_minus, m1_plus) phase-diagram sweeps.

#include "echolab/echolab.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace el = echolab;

namespace {

struct GlobalOptions {
    std::string preset = "esn2d";
    std::string config_file;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = ".";
};

el::MapFamily load_family(const GlobalOptions& g) {
    if (!g.config_file.empty())
        return el::family_from_json(el::Json::parse(el::read_text_file(g.config_file)));
    return el::family_from_name(g.preset);
}

struct SpecFlags {
    std::string spec_file;
    int m0_minus = 1, m0_plus = 0;  // 0: unbounded
    int m1_minus = 1, m1_plus = 0;
    double p0 = 0.5, p1 = 0.5;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--spec", spec_file, "repeat-spec JSON file (overrides the flags below)");
        cmd.add_option("--m0-minus", m0_minus, "minimum run of symbol 0");
        cmd.add_option("--m0-plus", m0_plus, "maximum run of symbol 0 (0 = unbounded)");
        cmd.add_option("--m1-minus", m1_minus, "minimum run of symbol 1");
        cmd.add_option("--m1-plus", m1_plus, "maximum run of symbol 1 (0 = unbounded)");
        cmd.add_option("--p0", p0, "repeat probability of symbol 0");
        cmd.add_option("--p1", p1, "repeat probability of symbol 1");
    }

    el::RepeatSpec resolve() const {
        if (!spec_file.empty())
            return el::repeat_spec_from_json(el::Json::parse(el::read_text_file(spec_file)));
        const auto plus = [](int m) {
            return m > 0 ? std::optional<int>(m) : std::nullopt;
        };
        auto spec = el::RepeatSpec::binary(m0_minus, plus(m0_plus), m1_minus, plus(m1_plus), p0, p1);
        spec.validate();
        return spec;
    }
};

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content;
    else
        el::write_text_file(path, content);
}

int thread_count(const GlobalOptions& g) {
    if (const char* env = std::getenv("ECHOLAB_THREADS")) return std::max(1, std::atoi(env));
    return g.threads;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"input-driven multistability toolbox"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--preset", global.preset, "map family preset: esn2d or diabolic")
        ->capture_default_str();
    app.add_option("--config", global.config_file, "JSON config file (family or sweep config)");
    app.add_option("--seed", global.seed, "base random seed")->capture_default_str();
    app.add_option("--threads", global.threads, "worker threads (0 = all cores)");
    app.add_option("--out-dir", global.out_dir, "output directory")->capture_default_str();

    // ---- inputs ----
    auto* inputs = app.add_subcommand("inputs", "constrained symbol sequences");
    inputs->require_subcommand(1);

    auto* gen = inputs->add_subcommand("gen", "sample a sequence from a repeat spec");
    SpecFlags gen_spec;
    gen_spec.add_to(*gen);
    int gen_length = 2000;
    std::string gen_out, gen_start = "uniform";
    gen->add_option("--length", gen_length, "window length")->capture_default_str();
    gen->add_option("--start", gen_start, "start symbol: 'uniform' or a digit");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    auto* validate = inputs->add_subcommand("validate", "scan a sequence for forbidden words");
    SpecFlags val_spec;
    val_spec.add_to(*validate);
    std::string val_sequence;
    validate->add_option("--sequence", val_sequence, "sequence text file")->required();

    // ---- atlas ----
    auto* atlas_cmd = app.add_subcommand("atlas", "fixed points, basins and transitions");
    int atlas_grid = 200;
    atlas_cmd->add_option("--grid-res", atlas_grid, "basin grid resolution")->capture_default_str();

    // ---- echo ----
    auto* echo_cmd = app.add_subcommand("echo", "estimate the echo index of one window");
    SpecFlags echo_spec;
    echo_spec.add_to(*echo_cmd);
    std::string echo_sequence, echo_csv;
    int echo_t = 2000, echo_nic = 50;
    double echo_tol = 1e-3;
    echo_cmd->add_option("--sequence", echo_sequence, "sequence file (overrides the spec flags)");
    echo_cmd->add_option("--length", echo_t, "steps T")->capture_default_str();
    echo_cmd->add_option("--n-ic", echo_nic, "initial conditions")->capture_default_str();
    echo_cmd->add_option("--cluster-tol", echo_tol, "clustering threshold")->capture_default_str();
    echo_cmd->add_option("--csv", echo_csv, "append one CSV row to this file");

    // ---- esp ----
    auto* esp_cmd = app.add_subcommand("esp", "pullback echo-state-property test");
    SpecFlags esp_spec;
    esp_spec.add_to(*esp_cmd);
    std::string esp_sequence;
    int esp_depth = 500, esp_ensemble = 50;
    double esp_eps = 1e-6;
    esp_cmd->add_option("--sequence", esp_sequence, "sequence file (origin marks time 0)");
    esp_cmd->add_option("--depth", esp_depth, "pullback depth n")->capture_default_str();
    esp_cmd->add_option("--eps", esp_eps, "collapse tolerance")->capture_default_str();
    esp_cmd->add_option("--ensemble", esp_ensemble, "ensemble size")->capture_default_str();

    // ---- mmin ----
    auto* mmin_cmd = app.add_subcommand("mmin", "funneling horizon of one map");
    int mmin_map = 1, mmin_grid = 100, mmin_cap = 1000;
    double mmin_eps = 1e-2;
    bool mmin_ball = false;
    mmin_cmd->add_option("--map", mmin_map, "map index")->capture_default_str();
    mmin_cmd->add_option("--grid-res", mmin_grid, "region grid resolution")->capture_default_str();
    mmin_cmd->add_option("--eps", mmin_eps, "ball radius for the ball criterion")
        ->capture_default_str();
    mmin_cmd->add_option("--cap", mmin_cap, "iteration cap")->capture_default_str();
    mmin_cmd->add_flag("--ball", mmin_ball,
                       "force the enter-ball criterion (default: esn2d map 1 uses the "
                       "cross-below-saddle criterion)");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "(m0_minus, m1_plus) phase diagram");
    el::SweepConfig sweep_cfg;
    int sw_m0_lo = 1, sw_m0_hi = 40, sw_m1_lo = 1, sw_m1_hi = 40;
    sweep_cmd->add_option("--m0-lo", sw_m0_lo, "m0_minus range start")->capture_default_str();
    sweep_cmd->add_option("--m0-hi", sw_m0_hi, "m0_minus range end")->capture_default_str();
    sweep_cmd->add_option("--m1-lo", sw_m1_lo, "m1_plus range start")->capture_default_str();
    sweep_cmd->add_option("--m1-hi", sw_m1_hi, "m1_plus range end")->capture_default_str();
    sweep_cmd->add_option("--m0-plus", sweep_cfg.m0_plus, "fixed m0_plus")->capture_default_str();
    sweep_cmd->add_option("--m1-minus", sweep_cfg.m1_minus, "fixed m1_minus")->capture_default_str();
    sweep_cmd->add_option("--p0", sweep_cfg.p0, "repeat probability of 0")->capture_default_str();
    sweep_cmd->add_option("--p1", sweep_cfg.p1, "repeat probability of 1")->capture_default_str();
    sweep_cmd->add_option("--t", sweep_cfg.sequence_length, "steps T")->capture_default_str();
    sweep_cmd->add_option("--n-ic", sweep_cfg.ensemble_size, "initial conditions per cell")
        ->capture_default_str();
    sweep_cmd->add_option("--cluster-tol", sweep_cfg.cluster_tol, "clustering threshold")
        ->capture_default_str();
    sweep_cmd->add_option("--realizations", sweep_cfg.realizations,
                          "sequence realizations averaged per cell")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const std::filesystem::path out_dir = global.out_dir;

        if (gen->parsed()) {
            const auto spec = gen_spec.resolve();
            el::StartRule start;
            if (gen_start != "uniform") start.fixed = std::stoi(gen_start);
            const auto seq = el::generate_sequence(spec, gen_length, global.seed, start);
            write_or_print(gen_out, el::sequence_to_text(seq));
            return 0;
        }

        if (validate->parsed()) {
            const auto spec = val_spec.resolve();
            const auto seq = el::sequence_from_text(el::read_text_file(val_sequence));
            const auto violations =
                el::validate_sequence(seq, el::build_forbidden_set(spec));
            el::Json out;
            out["violations"] = el::Json::array();
            for (const auto& v : violations) {
                std::string w;
                for (auto s : v.word) w.push_back(static_cast<char>('0' + s));
                out["violations"].push_back(el::Json{{"position", v.position}, {"word", w}});
            }
            out["admissible"] = violations.empty();
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (atlas_cmd->parsed()) {
            const auto family = load_family(global);
            el::AtlasOptions opt;
            opt.basins.grid_res = atlas_grid;
            const auto atlas = el::build_atlas(family, opt);
            std::filesystem::create_directories(out_dir);
            el::write_text_file(out_dir / "atlas.json", el::to_json(atlas).dump(2) + "\n");
            for (std::size_t i = 0; i < atlas.maps.size(); ++i)
                el::write_text_file(out_dir / ("basin_" + std::to_string(i) + ".pgm"),
                                    el::basin_pgm(atlas.maps[i].basins));
            for (std::size_t i = 0; i < atlas.maps.size(); ++i)
                std::cout << "map " << i << ": " << atlas.maps[i].stable.size() << " stable, "
                          << atlas.maps[i].other.size() << " other fixed points, unresolved "
                          << atlas.maps[i].basins.unresolved_fraction << "\n";
            std::cout << "wrote " << (out_dir / "atlas.json").string() << "\n";
            return 0;
        }

        if (echo_cmd->parsed()) {
            const auto family = load_family(global);
            el::SymbolSequence seq;
            if (!echo_sequence.empty()) {
                seq = el::sequence_from_text(el::read_text_file(echo_sequence));
            } else {
                seq = el::generate_sequence(echo_spec.resolve(), echo_t,
                                            el::seed_combine(global.seed, 1));
            }
            const auto est = el::estimate_echo_index(family, seq, echo_nic, echo_t, echo_tol,
                                                     el::seed_combine(global.seed, 2));
            std::cout << el::to_json(est).dump(2) << "\n";
            if (!echo_csv.empty()) {
                const bool fresh = !std::filesystem::exists(echo_csv);
                std::ofstream out(echo_csv, std::ios::app);
                if (!out) throw el::IoError("cannot append to '" + echo_csv + "'");
                if (fresh) out << el::echo_csv_header();
                out << el::echo_csv_row(est);
            }
            return 0;
        }

        if (esp_cmd->parsed()) {
            const auto family = load_family(global);
            el::SymbolSequence seq;
            if (!esp_sequence.empty()) {
                seq = el::sequence_from_text(el::read_text_file(esp_sequence));
            } else {
                seq = el::generate_sequence(esp_spec.resolve(), 2 * esp_depth + 1,
                                            el::seed_combine(global.seed, 1));
                seq.origin = 2 * esp_depth;  // window covers the doubled depth
            }
            const auto report = el::esp_test(family, seq, esp_depth, esp_eps, esp_ensemble,
                                             el::seed_combine(global.seed, 2));
            std::cout << el::to_json(report).dump(2) << "\n";
            return 0;
        }

        if (mmin_cmd->parsed()) {
            const auto family = load_family(global);
            el::FunnelCriterion criterion;
            el::Box region = family.domain();
            if (!mmin_ball && family.name() == "esn2d" && mmin_map == 1) {
                // Region: the half of the square above the saddle of map 0;
                // criterion: every image strictly below that line.
                const auto fps = el::find_fixed_points(family, 0);
                double saddle_x2 = 0.0;
                for (const auto& fp : fps.points)
                    if (fp.kind == el::StabilityKind::kSaddle) saddle_x2 = fp.location[1];
                criterion = el::FunnelCriterion::below(1, saddle_x2);
                region = el::Box(el::Vector{{-1.0, saddle_x2}}, el::Vector{{1.0, 1.0}});
            } else {
                const auto stable =
                    el::stable_only(el::find_fixed_points(family, mmin_map));
                if (stable.empty()) throw el::NoStablePoints("map has no stable fixed point");
                std::vector<el::Vector> centers;
                for (const auto& fp : stable) centers.push_back(fp.location);
                criterion = el::FunnelCriterion::enter_balls(std::move(centers), mmin_eps);
            }
            const int m = el::estimate_mmin(family, mmin_map, criterion, region, mmin_grid,
                                            mmin_cap);
            el::Json out;
            out["m_min"] = m;
            out["map"] = mmin_map;
            out["grid_res"] = mmin_grid;
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (sweep_cmd->parsed()) {
            if (!global.config_file.empty()) {
                sweep_cfg = el::sweep_config_from_json(
                    el::Json::parse(el::read_text_file(global.config_file)));
            } else {
                sweep_cfg.preset = global.preset;
                sweep_cfg.m0_minus_lo = sw_m0_lo;
                sweep_cfg.m0_minus_hi = sw_m0_hi;
                sweep_cfg.m1_plus_lo = sw_m1_lo;
                sweep_cfg.m1_plus_hi = sw_m1_hi;
                sweep_cfg.base_seed = global.seed;
            }
            sweep_cfg.threads = thread_count(global);
            const auto family = el::family_from_name(sweep_cfg.preset);
            const auto result = el::run_sweep(family, sweep_cfg);
            el::emit_outputs(result, out_dir);
            std::cout << "sweep: " << result.cells.size() << " cells -> "
                      << (out_dir / "sweep.csv").string() << "\n";
            if (!result.warned_columns.empty())
                std::cerr << "monotonicity warnings in " << result.warned_columns.size()
                          << " column(s)\n";
            return result.any_error() ? 2 : 0;
        }
    } catch (const el::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
