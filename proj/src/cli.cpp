#include "bandflow/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "bandflow/classical.hpp"
#include "bandflow/errors.hpp"
#include "bandflow/io.hpp"
#include "bandflow/lattice.hpp"
#include "bandflow/parallel.hpp"
#include "bandflow/quantum.hpp"
#include "bandflow/semiquantum.hpp"

namespace bandflow::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
    io::RunConfig config;
    fs::path out_dir;
    unsigned threads = 1;
    std::uint64_t seed = 1;
    std::ostream& out;
    std::ostream& err;
};

unsigned resolve_threads(int flag)
{
    if (flag > 0) {
        return static_cast<unsigned>(flag);
    }
    if (const char* env = std::getenv("BANDFLOW_THREADS"); env && *env) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (*end != '\0' || n < 1 || n > 4096) {
            throw ConfigError(std::string("BANDFLOW_THREADS must be a positive integer, got '") + env + "'");
        }
        return static_cast<unsigned>(n);
    }
    return 1;
}

std::vector<double> a_values(const Context& ctx, const char* command)
{
    if (!ctx.config.a_grid.empty()) {
        return ctx.config.a_grid;
    }
    if (ctx.config.has_A) {
        return {ctx.config.model.A};
    }
    throw ConfigError(std::string(command) + " needs a non-empty A_grid (or model.A)");
}

void warn(const Context& ctx)
{
    for (const auto& w : ctx.config.model.warnings()) {
        ctx.err << "warning: " << w << "\n";
    }
}

int cmd_spectrum(Context& ctx)
{
    const auto grid = a_values(ctx, "spectrum");
    std::vector<std::vector<io::SpectrumRow>> per_a(grid.size());
    std::vector<std::size_t> unassigned(grid.size());
    parallel_for(grid.size(), ctx.threads, [&](std::size_t i) {
        const auto spec = quantum::joint_spectrum(ctx.config.model.with_A(grid[i]));
        const auto bands = quantum::assign_bands(spec);
        per_a[i] = io::spectrum_rows(spec, bands);
        unassigned[i] = bands.unassigned.size();
    });
    std::vector<io::SpectrumRow> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.insert(rows.end(), per_a[i].begin(), per_a[i].end());
        if (unassigned[i] > 0) {
            ctx.err << "note: A = " << io::format_double(grid[i]) << ": " << unassigned[i]
                    << " level(s) left without a band (band = -1)\n";
        }
    }
    const fs::path path = ctx.out_dir / "spectrum.csv";
    io::write_atomic(path, io::spectrum_csv(rows));
    ctx.out << "wrote " << rows.size() << " levels for " << grid.size() << " A value(s) to " << path.string()
            << "\n";
    return ok;
}

int cmd_chern(Context& ctx)
{
    const auto grid = a_values(ctx, "chern");
    const auto mesh = semiquantum::SphereMesh::lat_long(ctx.config.mesh_n_theta, ctx.config.mesh_n_phi);
    semiquantum::ChernOptions options;
    options.threads = ctx.threads;

    std::vector<io::ChernRow> rows;
    int invalid = 0;
    for (double a : grid) {
        PhysParams p = ctx.config.model.with_A(a);
        if (ctx.config.chern_counterpart) {
            p = semiquantum::semiquantum_counterpart(p);
        }
        const auto report = semiquantum::chern_numbers(p, mesh, options);
        rows.push_back(io::ChernRow{a, p.band_count(), report.chern, report.min_gap, report.valid});
        if (!report.valid) {
            ++invalid;
            ctx.err << "refused at A = " << io::format_double(a) << ": " << report.message << "\n";
        }
    }
    const fs::path path = ctx.out_dir / "chern.csv";
    io::write_atomic(path, io::chern_csv(rows));
    ctx.out << "wrote " << rows.size() << " Chern row(s) to " << path.string() << "\n";
    return invalid == 0 ? ok : numerical_refusal;
}

int cmd_emmap(Context& ctx)
{
    warn(ctx);
    const PhysParams& p = ctx.config.model;
    const auto jz = ctx.config.emmap_jz.empty() ? classical::uniform_jz_grid(p, 201) : ctx.config.emmap_jz;
    classical::EMOptions options;
    options.scan_points = ctx.config.emmap_scan_points;
    options.threads = ctx.threads;
    const auto image = classical::em_image(p, jz, options);

    io::write_atomic(ctx.out_dir / "emmap.csv", io::emmap_csv(image));
    io::write_atomic(ctx.out_dir / "emmap_critical.csv", io::critical_csv(image));
    for (const auto& c : image.critical_values) {
        ctx.out << "critical value jz = " << io::format_double(c.jz) << ", E = " << io::format_double(c.energy)
                << ": " << classical::location_name(c.location) << "\n";
    }

    if (ctx.config.emmap_sample_check > 0) {
        std::mt19937_64 rng(ctx.seed);
        std::string csv = "jz,sampled_min,sampled_max\n";
        int outside = 0;
        for (std::size_t i = 0; i < image.jz.size(); ++i) {
            const auto [lo, hi] = classical::sampled_slice_range(p, image.jz[i], ctx.config.emmap_sample_check, rng);
            const double tol = 1e-9 * std::max(1.0, image.e_max[i] - image.e_min[i]);
            if (lo < image.e_min[i] - tol || hi > image.e_max[i] + tol) {
                ++outside;
            }
            csv += io::format_double(image.jz[i]) + "," + io::format_double(lo) + "," + io::format_double(hi) + "\n";
        }
        io::write_atomic(ctx.out_dir / "emmap_sampled.csv", csv);
        if (outside > 0) {
            ctx.err << outside << " slice(s) have sampled energies outside the computed range\n";
            return numerical_refusal;
        }
    }
    ctx.out << "wrote " << image.jz.size() << " slices to " << (ctx.out_dir / "emmap.csv").string() << "\n";
    return ok;
}

int cmd_dh(Context& ctx)
{
    const PhysParams& p = ctx.config.model;
    const double s = classical::spin_amplitude(p);
    const double l = classical::orbital_amplitude(p);
    const auto jz = ctx.config.dh_jz.empty() ? classical::uniform_jz_grid(p, 401) : ctx.config.dh_jz;
    const auto profile = classical::dh_volume(s, l, jz);
    const fs::path path = ctx.out_dir / "dh.csv";
    io::write_atomic(path, io::dh_csv(profile));
    ctx.out << "kinks at jz =";
    for (double k : classical::dh_kinks(s, l)) {
        ctx.out << " " << io::format_double(k);
    }
    ctx.out << "\nwrote " << profile.jz.size() << " points to " << path.string() << "\n";
    return ok;
}

std::vector<lattice::Waypoint> loop_waypoints(const io::LoopSpec& spec,
                                              const std::vector<lattice::Waypoint>& defects)
{
    if (!spec.waypoints.empty()) {
        return spec.waypoints;
    }
    double jz_lo = 0, jz_hi = 0, e_lo = 0, e_hi = 0;
    for (std::size_t k = 0; k < spec.around.size(); ++k) {
        const auto idx = static_cast<std::size_t>(spec.around[k]);
        if (idx >= defects.size()) {
            throw ConfigError("loop '" + spec.name + "' refers to defect " + std::to_string(idx) + " but only " +
                              std::to_string(defects.size()) + " interior critical value(s) exist");
        }
        const auto& d = defects[idx];
        jz_lo = k == 0 ? d.jz : std::min(jz_lo, d.jz);
        jz_hi = k == 0 ? d.jz : std::max(jz_hi, d.jz);
        e_lo = k == 0 ? d.energy : std::min(e_lo, d.energy);
        e_hi = k == 0 ? d.energy : std::max(e_hi, d.energy);
    }
    return lattice::rectangle_loop(0.5 * (jz_lo + jz_hi), 0.5 * (e_lo + e_hi),
                                   0.5 * (jz_hi - jz_lo) + spec.half_width, 0.5 * (e_hi - e_lo) + spec.half_height,
                                   spec.orientation);
}

int cmd_monodromy(Context& ctx)
{
    warn(ctx);
    const PhysParams& p = ctx.config.model;
    const auto lat = lattice::QuantumLattice::from_spectrum(quantum::joint_spectrum(p));

    io::MonodromyOutput output;
    output.params = p;
    if (p.gamma != std::complex<double>{}) {
        for (const auto& c : classical::em_image(p, {}).critical_values) {
            if (c.location == classical::CriticalLocation::interior) {
                output.defects.push_back({c.jz, c.energy});
            }
        }
    }

    auto specs = ctx.config.loops;
    if (specs.empty()) {
        for (std::size_t i = 0; i < output.defects.size(); ++i) {
            specs.push_back(io::LoopSpec{"defect" + std::to_string(i), {}, {static_cast<int>(i)}});
        }
        if (output.defects.size() > 1) {
            io::LoopSpec all{"all_defects", {}, {}};
            for (std::size_t i = 0; i < output.defects.size(); ++i) {
                all.around.push_back(static_cast<int>(i));
            }
            specs.push_back(all);
        }
    }
    if (specs.empty()) {
        throw ConfigError("no loops configured and no interior critical values to surround");
    }

    for (const auto& spec : specs) {
        io::LoopResult r;
        r.name = spec.name;
        r.waypoints = loop_waypoints(spec, output.defects);
        const auto start = lattice::initial_cell(lat, r.waypoints.front());
        r.transport = lattice::transport_cell(lat, start, r.waypoints);
        ctx.out << spec.name << ": " << r.transport.matrix.str() << " ("
                << lattice::orientation_name(lattice::loop_orientation(r.waypoints)) << ")\n";
        output.loops.push_back(std::move(r));
    }
    const fs::path path = ctx.out_dir / "monodromy.json";
    io::write_atomic(path, io::monodromy_json(output));
    ctx.out << "wrote " << path.string() << "\n";
    return ok;
}

int cmd_flow(Context& ctx)
{
    warn(ctx);
    const auto points = ctx.config.flow_points.empty() ? a_values(ctx, "flow") : ctx.config.flow_points;
    const auto report = quantum::sweep_spectral_flow(ctx.config.model, points, ctx.threads);
    const fs::path path = ctx.out_dir / "flow.json";
    io::write_atomic(path, io::flow_json(report, ctx.config.model));
    ctx.out << "global delta N (ascending bands):";
    for (int g : report.global_flow) {
        ctx.out << " " << g;
    }
    ctx.out << "\nwrote " << path.string() << "\n";
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Band rearrangement, Chern numbers and monodromy for a spin-orbit model"};
    app.name("bandflow");
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--threads", threads, "Worker threads (default: BANDFLOW_THREADS or 1)")
        ->check(CLI::Range(1, 4096));
    app.add_option("--seed", seed, "Seed for sampling checks");

    using Handler = int (*)(Context&);
    const std::vector<std::pair<std::string, std::pair<std::string, Handler>>> commands{
        {"spectrum", {"Joint spectrum with band labels over an A grid", cmd_spectrum}},
        {"chern", {"Chern numbers of the semi-quantum bands over an A grid", cmd_chern}},
        {"emmap", {"Energy-momentum image and its critical values", cmd_emmap}},
        {"dh", {"Reduced phase-space volume as a function of jz", cmd_dh}},
        {"monodromy", {"Cell transport around lattice defects", cmd_monodromy}},
        {"flow", {"Spectral flow across representative A values", cmd_flow}},
    };
    for (const auto& [name, info] : commands) {
        app.add_subcommand(name, info.first);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return config_error;
    }

    try {
        Context ctx{io::load_config(config_path), {}, resolve_threads(threads), seed, out, err};
        ctx.out_dir = !out_dir.empty() ? fs::path(out_dir) : fs::path(ctx.config.out_dir.value_or("."));
        for (const auto& [name, info] : commands) {
            if (app.got_subcommand(name)) {
                return info.second(ctx);
            }
        }
        return internal_error;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const TransportError& e) {
        err << "transport error: " << e.what() << "\n";
        return transport_ambiguity;
    } catch (const NumericalRefusal& e) {
        err << "numerical refusal: " << e.what() << "\n";
        return numerical_refusal;
    } catch (const ConvergenceError& e) {
        err << "numerical refusal: " << e.what() << "\n";
        return numerical_refusal;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return internal_error;
    }
}

} // namespace bandflow::cli
