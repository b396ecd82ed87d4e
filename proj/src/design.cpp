#include "nfwave/design.hpp"

#include "nfwave/correlation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nfwave {

namespace fs = std::filesystem;

namespace {

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    }
    std::ostream& stream() { return out_; }
    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing '" + path_.string() + "'");
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void write_cut_header(std::ostream& o, int bins) {
    for (int u = 0; u < bins; ++u) o << (u ? "," : "") << "u" << u;
    o << "\n";
}

}  // namespace

DesignProblem build_problem(const RunConfig& cfg, std::optional<DesiredBeampattern> desired) {
    validate(cfg);
    GridSpec grid = build_grid(cfg.num_angles, cfg.num_ranges, cfg.code_length);
    SteeringContext ctx(array_config(cfg), grid);
    DesiredBeampattern target =
        desired ? std::move(*desired)
                : DesiredBeampattern::delta(grid, cfg.k1_star - 1, cfg.k2_star - 1, cfg.desired_peak);
    const auto& f = target.field();
    if (f.num_angles() != grid.num_angles || f.num_ranges() != grid.num_ranges || f.num_bins() != grid.num_bins)
        throw ConfigError("desired beampattern shape does not match K1 x K2 x N");
    return DesignProblem{std::move(ctx), std::move(target), wisl_profile(cfg)};
}

DesiredBeampattern load_desired_csv(const fs::path& path, const GridSpec& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read desired beampattern '" + path.string() + "'");
    GridField field(grid.num_angles, grid.num_ranges, grid.num_bins);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("desired beampattern file is empty");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell[4];
        for (auto& c : cell)
            if (!std::getline(row, c, ','))
                throw ConfigError("desired beampattern line " + std::to_string(line_no) + ": expected 4 fields");
        try {
            const int k1 = std::stoi(cell[0]);
            const int k2 = std::stoi(cell[1]);
            const int u = std::stoi(cell[2]);
            const double v = std::stod(cell[3]);
            if (k1 < 1 || k1 > grid.num_angles || k2 < 1 || k2 > grid.num_ranges || u < 0 || u >= grid.num_bins)
                throw ConfigError("desired beampattern line " + std::to_string(line_no) + ": index out of range");
            field.at(k1 - 1, k2 - 1, u) = v;
        } catch (const std::logic_error&) {
            throw ConfigError("desired beampattern line " + std::to_string(line_no) + ": malformed number");
        }
    }
    try {
        return DesiredBeampattern(std::move(field));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::string trace_json(const TraceEntry& e) {
    std::ostringstream o;
    o << "{\"epoch\":" << e.epoch << ",\"half\":\"" << e.half << "\""
      << ",\"combined\":" << json_number(e.combined) << ",\"matching\":" << json_number(e.matching)
      << ",\"wisl_quadratic\":" << json_number(e.wisl_quadratic) << ",\"wisl\":" << json_number(e.wisl)
      << ",\"copy_gap\":" << json_number(e.copy_gap) << ",\"lambda_m\":" << json_number(e.lambda_m)
      << ",\"inner_iterations\":" << e.inner_iterations << "}";
    return o.str();
}

std::vector<fs::path> emit_outputs(const SolverState& state, const SteeringContext& ctx, const RunConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    const CMatrix& x = state.solution().matrix();
    const int n = static_cast<int>(x.rows());
    const int m_count = static_cast<int>(x.cols());
    std::vector<fs::path> files;

    {
        CsvWriter w(dir / kWaveformFile);
        auto& o = w.stream();
        for (int m = 0; m < m_count; ++m) o << (m ? "," : "") << "x" << (m + 1);
        o << "\n";
        const RMatrix ph = state.solution().phases();
        for (int row = 0; row < n; ++row) {
            for (int m = 0; m < m_count; ++m) o << (m ? "," : "") << format_double(ph(row, m));
            o << "\n";
        }
        w.close();
        files.push_back(dir / kWaveformFile);
    }

    const GridField bp = beampattern_grid(x, ctx);
    const auto& grid = ctx.grid();
    {
        CsvWriter w(dir / kAngleCutFile);
        auto& o = w.stream();
        write_cut_header(o, grid.num_bins);
        for (int a = 0; a < grid.num_angles; ++a) {
            for (int u = 0; u < grid.num_bins; ++u) o << (u ? "," : "") << format_double(bp.at(a, cfg.k2_star - 1, u));
            o << "\n";
        }
        w.close();
        files.push_back(dir / kAngleCutFile);
    }
    {
        CsvWriter w(dir / kRangeCutFile);
        auto& o = w.stream();
        write_cut_header(o, grid.num_bins);
        for (int r = 0; r < grid.num_ranges; ++r) {
            for (int u = 0; u < grid.num_bins; ++u) o << (u ? "," : "") << format_double(bp.at(cfg.k1_star - 1, r, u));
            o << "\n";
        }
        w.close();
        files.push_back(dir / kRangeCutFile);
    }
    {
        const auto corr = compute_correlations(x);
        const auto levels = correlation_level_db(x);
        CsvWriter w(dir / kCorrelationFile);
        auto& o = w.stream();
        o << "m,m_prime,k,abs_r,level_db\n";
        std::size_t i = 0;
        for (int m = 0; m < m_count; ++m)
            for (int mp = 0; mp < m_count; ++mp)
                for (int k = -n + 1; k < n; ++k, ++i)
                    o << (m + 1) << "," << (mp + 1) << "," << k << "," << format_double(std::abs(corr.values[i]))
                      << "," << format_double(levels[i]) << "\n";
        w.close();
        files.push_back(dir / kCorrelationFile);
    }
    {
        CsvWriter w(dir / kTraceFile);
        for (const auto& e : state.trace) w.stream() << trace_json(e) << "\n";
        w.close();
        files.push_back(dir / kTraceFile);
    }
    return files;
}

DesignResult run_design(const RunConfig& cfg, std::optional<DesiredBeampattern> desired) {
    const DesignProblem problem = build_problem(cfg, std::move(desired));
    DesignResult result;
    result.state = cypmli(problem.ctx, problem.desired, problem.profile, cfg.solver);
    result.files = emit_outputs(result.state, problem.ctx, cfg);
    return result;
}

}  // namespace nfwave
