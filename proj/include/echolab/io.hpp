#pragma once

#include "echolab/atlas.hpp"
#include "echolab/cocycle.hpp"
#include "echolab/common.hpp"
#include "echolab/echo.hpp"
#include "echolab/map_family.hpp"
#include "echolab/sweep.hpp"
#include "echolab/symbolic.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace echolab {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// files

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// repeat specs

inline Json to_json(const RepeatSpec& spec) {
    Json j;
    j["alphabet"] = spec.alphabet;
    j["m_minus"] = spec.m_minus;
    Json plus = Json::array();
    for (const auto& m : spec.m_plus) m ? plus.push_back(*m) : plus.push_back(nullptr);
    j["m_plus"] = std::move(plus);
    if (!spec.p.empty()) {
        Json p = Json::array();
        for (const auto& v : spec.p) v ? p.push_back(*v) : p.push_back(nullptr);
        j["p"] = std::move(p);
    }
    return j;
}

inline RepeatSpec repeat_spec_from_json(const Json& j) {
    RepeatSpec spec;
    spec.alphabet = j.at("alphabet").get<int>();
    spec.m_minus = j.at("m_minus").get<std::vector<int>>();
    spec.m_plus.clear();
    for (const auto& v : j.at("m_plus"))
        spec.m_plus.push_back(v.is_null() ? std::nullopt : std::optional<int>(v.get<int>()));
    spec.p.clear();
    if (j.contains("p"))
        for (const auto& v : j.at("p"))
            spec.p.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// sequences: one digit per symbol plus an origin header

inline std::string sequence_to_text(const SymbolSequence& seq) {
    seq.check_origin();
    std::string out = "#origin=" + std::to_string(seq.origin) + "\n";
    out.reserve(out.size() + seq.symbols.size() + 1);
    for (Symbol s : seq.symbols) {
        if (s < 0 || s > 9) throw IoError("text format supports alphabets up to 10 symbols");
        out.push_back(static_cast<char>('0' + s));
    }
    out.push_back('\n');
    return out;
}

inline SymbolSequence sequence_from_text(const std::string& text) {
    SymbolSequence seq;
    seq.origin = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (line.rfind("#origin", 0) == 0 && eq != std::string::npos)
                seq.origin = std::stoll(line.substr(eq + 1));
            continue;
        }
        for (char c : line) {
            if (c < '0' || c > '9') throw IoError("sequence text must be digits");
            seq.symbols.push_back(c - '0');
        }
    }
    seq.check_origin();
    return seq;
}

// ---------------------------------------------------------------------------
// map families

inline Json to_json(const EsnParams& params) {
    Json j;
    Json wr = Json::array();
    for (Eigen::Index r = 0; r < params.w_reservoir.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < params.w_reservoir.cols(); ++c)
            row.push_back(params.w_reservoir(r, c));
        wr.push_back(std::move(row));
    }
    j["W_r"] = std::move(wr);
    Json win = Json::array();
    for (Eigen::Index r = 0; r < params.w_input.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < params.w_input.cols(); ++c)
            row.push_back(params.w_input(r, c));
        win.push_back(std::move(row));
    }
    j["W_in"] = std::move(win);
    j["alpha"] = params.leak;
    Json inputs = Json::array();
    for (const auto& u : params.inputs) {
        Json row = Json::array();
        for (Eigen::Index d = 0; d < u.size(); ++d) row.push_back(u[d]);
        inputs.push_back(std::move(row));
    }
    j["inputs"] = std::move(inputs);
    return j;
}

inline Matrix matrix_from_json(const Json& rows) {
    if (!rows.is_array() || rows.empty()) throw IoError("matrix must be a nonempty array of rows");
    const auto nrows = rows.size();
    const auto ncols = rows.front().size();
    Matrix m(nrows, ncols);
    for (std::size_t r = 0; r < nrows; ++r) {
        if (rows[r].size() != ncols) throw IoError("matrix rows must have equal length");
        for (std::size_t c = 0; c < ncols; ++c) m(r, c) = rows[r][c].get<double>();
    }
    return m;
}

inline EsnParams esn_params_from_json(const Json& j) {
    EsnParams p;
    p.w_reservoir = matrix_from_json(j.at("W_r"));
    p.w_input = matrix_from_json(j.at("W_in"));
    p.leak = j.at("alpha").get<double>();
    for (const auto& row : j.at("inputs")) {
        Vector u(row.size());
        for (std::size_t d = 0; d < row.size(); ++d) u[d] = row[d].get<double>();
        p.inputs.push_back(std::move(u));
    }
    p.validate();
    return p;
}

/// Build a family from either {"preset": "esn2d"|"diabolic"} or inline
/// network parameters.
inline MapFamily family_from_json(const Json& j) {
    if (j.contains("preset")) {
        const auto name = j.at("preset").get<std::string>();
        if (name == "esn2d") return make_esn2d();
        if (name == "diabolic") return make_diabolic();
        throw InvalidSpec("unknown preset '" + name + "'");
    }
    return make_esn(esn_params_from_json(j), "custom");
}

inline MapFamily family_from_name(const std::string& name) {
    if (name == "esn2d") return make_esn2d();
    if (name == "diabolic") return make_diabolic();
    throw InvalidSpec("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// atlas

inline Json to_json(const FixedPoint& fp) {
    Json j;
    Json loc = Json::array();
    for (Eigen::Index d = 0; d < fp.location.size(); ++d) loc.push_back(fp.location[d]);
    j["location"] = std::move(loc);
    Json eig = Json::array();
    for (Eigen::Index d = 0; d < fp.eigenvalues.size(); ++d)
        eig.push_back(Json{{"re", fp.eigenvalues[d].real()}, {"im", fp.eigenvalues[d].imag()}});
    j["eigenvalues"] = std::move(eig);
    j["kind"] = to_string(fp.kind);
    j["residual"] = fp.residual;
    return j;
}

inline Json to_json(const AttractorAtlas& atlas) {
    Json j;
    j["family"] = atlas.family_name;
    Json maps = Json::array();
    for (const auto& entry : atlas.maps) {
        Json m;
        Json stable = Json::array();
        for (const auto& fp : entry.stable) stable.push_back(to_json(fp));
        m["stable"] = std::move(stable);
        Json other = Json::array();
        for (const auto& fp : entry.other) other.push_back(to_json(fp));
        m["other"] = std::move(other);
        m["unresolved_fraction"] = entry.basins.unresolved_fraction;
        m["dropped_seeds"] = entry.dropped_seeds;
        maps.push_back(std::move(m));
    }
    j["maps"] = std::move(maps);
    Json table = Json::array();
    for (std::size_t i = 0; i < atlas.table.entries.size(); ++i)
        for (std::size_t jj = 0; jj < atlas.table.entries[i].size(); ++jj)
            for (std::size_t k = 0; k < atlas.table.entries[i][jj].size(); ++k)
                table.push_back(Json{{"i", i},
                                     {"j", jj},
                                     {"k", k},
                                     {"to", atlas.table.entries[i][jj][k]}});
    j["transitions"] = std::move(table);
    j["attractor_counts"] = atlas.table.attractor_counts;
    Json straddles = Json::array();
    for (const auto& s : atlas.table.straddles)
        straddles.push_back(Json{{"i", s.i}, {"j", s.j}, {"k", s.k}});
    j["straddles"] = std::move(straddles);
    return j;
}

// ---------------------------------------------------------------------------
// portable graymap (plain P2)

inline std::string pgm_p2(int width, int height, int maxval, const std::vector<int>& pixels) {
    if (width < 1 || height < 1 || static_cast<int>(pixels.size()) != width * height)
        throw IoError("pixel count must equal width * height");
    std::string out = "P2\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                      std::to_string(std::max(1, maxval)) + "\n";
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (c) out.push_back(' ');
            out += std::to_string(pixels[static_cast<std::size_t>(r) * width + c]);
        }
        out.push_back('\n');
    }
    return out;
}

/// Basin grid as a graymap: unresolved cells are 0, attractor j maps to
/// j + 1. Rows run top-to-bottom in decreasing last coordinate.
inline std::string basin_pgm(const BasinGrid& grid) {
    if (grid.region.dim() > 2) throw IoError("basin graymaps support at most 2 dimensions");
    const int res = grid.resolution;
    const int height = grid.region.dim() == 2 ? res : 1;
    std::vector<int> pixels;
    pixels.reserve(grid.labels.size());
    int maxval = 1;
    if (grid.region.dim() == 1) {
        for (int c = 0; c < res; ++c) pixels.push_back(grid.labels[c] + 1);
    } else {
        for (int row = 0; row < height; ++row)
            for (int c = 0; c < res; ++c) {
                const int x2_cell = res - 1 - row;  // top row = largest x2
                pixels.push_back(grid.labels[static_cast<std::size_t>(c) * res + x2_cell] + 1);
            }
    }
    for (int v : pixels) maxval = std::max(maxval, v);
    return pgm_p2(res, height, maxval, pixels);
}

// ---------------------------------------------------------------------------
// trajectories, pullback, echo

/// CSV rows k, symbol, x_1..x_n. The symbol column holds the input applied
/// at time k; the final state row carries the next window symbol if
/// present, else -1.
inline std::string trajectory_csv(const Trajectory& traj, const SymbolSequence& v) {
    std::ostringstream out;
    out << "k,symbol";
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    for (int d = 1; d <= n; ++d) out << ",x_" << d;
    out << "\n";
    out.precision(17);
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const std::ptrdiff_t k = traj.from_k + static_cast<std::ptrdiff_t>(s);
        out << k << "," << (v.covers(k) ? v.at_time(k) : -1);
        for (int d = 0; d < n; ++d) out << "," << traj.states[s][d];
        out << "\n";
    }
    return out.str();
}

inline Json to_json(const PullbackReport& report, double cluster_tol = 1e-3) {
    Json j;
    j["steps"] = report.steps;
    j["diameter"] = report.diameter;
    if (report.hausdorff_to_reference)
        j["hausdorff_to_reference"] = *report.hausdorff_to_reference;
    const auto clusters = single_linkage(report.cloud, cluster_tol);
    j["cluster_count"] = clusters.sizes.size();
    Json cs = Json::array();
    for (std::size_t c = 0; c < clusters.sizes.size(); ++c) {
        Json one;
        one["size"] = clusters.sizes[c];
        Json center = Json::array();
        for (Eigen::Index d = 0; d < clusters.centers[c].size(); ++d)
            center.push_back(clusters.centers[c][d]);
        one["center"] = std::move(center);
        cs.push_back(std::move(one));
    }
    j["clusters"] = std::move(cs);
    return j;
}

inline Json to_json(const EspReport& report) {
    Json j;
    j["verdict"] = to_string(report.verdict);
    j["diameter"] = report.diameter;
    j["clusters"] = report.clusters;
    j["depth"] = report.depth;
    j["depth_deep"] = report.depth_deep;
    j["diameter_deep"] = report.diameter_deep;
    j["clusters_deep"] = report.clusters_deep;
    return j;
}

inline Json to_json(const EchoEstimate& est) {
    Json j;
    j["index"] = est.index;
    Json centers = Json::array();
    for (const auto& c : est.cluster_centers) {
        Json row = Json::array();
        for (Eigen::Index d = 0; d < c.size(); ++d) row.push_back(c[d]);
        centers.push_back(std::move(row));
    }
    j["cluster_centers"] = std::move(centers);
    j["cluster_sizes"] = est.cluster_sizes;
    j["T"] = est.steps;
    j["n_ic"] = est.ensemble_size;
    j["seed"] = est.seed;
    j["cluster_tol"] = est.cluster_tol;
    j["n_clusters_flagged"] = est.flagged_clusters;
    return j;
}

inline std::string echo_csv_header() { return "index,T,n_ic,seed,cluster_tol,n_clusters_flagged\n"; }

inline std::string echo_csv_row(const EchoEstimate& est) {
    std::ostringstream out;
    out << est.index << "," << est.steps << "," << est.ensemble_size << "," << est.seed << ","
        << est.cluster_tol << "," << est.flagged_clusters << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// sweep outputs

inline Json to_json(const SweepConfig& config) {
    Json j;
    j["preset"] = config.preset;
    j["m0_minus"] = Json{{"lo", config.m0_minus_lo}, {"hi", config.m0_minus_hi}};
    j["m1_plus"] = Json{{"lo", config.m1_plus_lo}, {"hi", config.m1_plus_hi}};
    j["m0_plus"] = config.m0_plus;
    j["m1_minus"] = config.m1_minus;
    j["p0"] = config.p0;
    j["p1"] = config.p1;
    j["T"] = config.sequence_length;
    j["n_ic"] = config.ensemble_size;
    j["cluster_tol"] = config.cluster_tol;
    j["base_seed"] = config.base_seed;
    j["realizations"] = config.realizations;
    return j;
}

inline SweepConfig sweep_config_from_json(const Json& j) {
    SweepConfig c;
    if (j.contains("preset")) c.preset = j.at("preset").get<std::string>();
    if (j.contains("m0_minus")) {
        c.m0_minus_lo = j.at("m0_minus").at("lo").get<int>();
        c.m0_minus_hi = j.at("m0_minus").at("hi").get<int>();
    }
    if (j.contains("m1_plus")) {
        c.m1_plus_lo = j.at("m1_plus").at("lo").get<int>();
        c.m1_plus_hi = j.at("m1_plus").at("hi").get<int>();
    }
    if (j.contains("m0_plus")) c.m0_plus = j.at("m0_plus").get<int>();
    if (j.contains("m1_minus")) c.m1_minus = j.at("m1_minus").get<int>();
    if (j.contains("p0")) c.p0 = j.at("p0").get<double>();
    if (j.contains("p1")) c.p1 = j.at("p1").get<double>();
    if (j.contains("T")) c.sequence_length = j.at("T").get<int>();
    if (j.contains("n_ic")) c.ensemble_size = j.at("n_ic").get<int>();
    if (j.contains("cluster_tol")) c.cluster_tol = j.at("cluster_tol").get<double>();
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("realizations")) c.realizations = j.at("realizations").get<int>();
    c.validate();
    return c;
}

inline std::string sweep_csv(const SweepResult& result) {
    std::string out = "m0_minus,m1_plus,index,seed,n_clusters_flagged\n";
    for (const auto& cell : result.cells) {
        out += std::to_string(cell.m0_minus) + "," + std::to_string(cell.m1_plus) + "," +
               std::to_string(cell.index) + "," + std::to_string(cell.seed) + "," +
               std::to_string(cell.flagged_clusters) + "\n";
    }
    return out;
}

/// Heatmap of the index grid: rows top-to-bottom in decreasing m1_plus,
/// columns left-to-right in increasing m0_minus.
inline std::string sweep_pgm(const SweepResult& result) {
    const auto& cfg = result.config;
    std::vector<int> pixels;
    pixels.reserve(static_cast<std::size_t>(cfg.rows()) * cfg.columns());
    int maxval = 1;
    for (int m1 = cfg.m1_plus_hi; m1 >= cfg.m1_plus_lo; --m1)
        for (int m0 = cfg.m0_minus_lo; m0 <= cfg.m0_minus_hi; ++m0) {
            const int v = result.cell(m0, m1).index;
            pixels.push_back(v);
            maxval = std::max(maxval, v);
        }
    return pgm_p2(cfg.columns(), cfg.rows(), maxval, pixels);
}

inline Json sweep_meta(const SweepResult& result) {
    Json j;
    j["config"] = to_json(result.config);
    j["warned_columns"] = result.warned_columns;
    Json errors = Json::array();
    for (const auto& cell : result.cells)
        if (!cell.error.empty())
            errors.push_back(Json{{"m0_minus", cell.m0_minus},
                                  {"m1_plus", cell.m1_plus},
                                  {"error", cell.error}});
    j["errors"] = std::move(errors);
    Json cells = Json::array();
    for (const auto& cell : result.cells)
        cells.push_back(Json{{"m0_minus", cell.m0_minus},
                             {"m1_plus", cell.m1_plus},
                             {"index", cell.index},
                             {"seed", cell.seed},
                             {"n_clusters_flagged", cell.flagged_clusters},
                             {"cluster_sizes", cell.cluster_sizes}});
    j["cells"] = std::move(cells);
    return j;
}

/// Write sweep.csv, sweep.pgm and sweep.meta.json into the directory.
inline void emit_outputs(const SweepResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    write_text_file(out_dir / "sweep.csv", sweep_csv(result));
    write_text_file(out_dir / "sweep.pgm", sweep_pgm(result));
    write_text_file(out_dir / "sweep.meta.json", sweep_meta(result).dump(2) + "\n");
}

}  // namespace echolab
