#include "aniso/runner.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "aniso/gaussline.hpp"
#include "aniso/isoperimetry.hpp"
#include "aniso/json_io.hpp"
#include "aniso/measures.hpp"
#include "aniso/oracle.hpp"
#include "aniso/symmetrize.hpp"

namespace aniso {

namespace {

std::vector<double> parse_csv_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

void emit(const RunConfig& cfg, const std::string& report) {
    if (cfg.out_path.empty())
        std::cout << report << "\n";
    else
        write_file(cfg.out_path, report + "\n");
}

void echo_config(JsonWriter& w, const RunConfig& cfg) {
    w.key("config").begin_object();
    w.key("command").value(cfg.command);
    w.key("grid").value(cfg.grid);
    w.key("rel_tol").value(cfg.rel_tol);
    w.key("seed").value(static_cast<unsigned long long>(cfg.seed));
    w.key("epsilon").value(cfg.epsilon);
    w.key("samples").value(static_cast<long long>(cfg.samples));
    w.end_object();
}

void measure_result_json(JsonWriter& w, const char* name, const MeasureResult& r) {
    w.key(name).begin_object();
    w.key("value").value(r.value);
    w.key("error_estimate").value(r.error_estimate);
    w.key("method").value(method_name(r.method));
    w.end_object();
}

SpdMatrix need_matrix(const RunConfig& cfg) {
    if (cfg.matrix_path.empty()) throw InputError("this command requires --matrix FILE");
    return parse_spd_json(read_file(cfg.matrix_path));
}

SetRegion need_set(const RunConfig& cfg) {
    if (cfg.set_path.empty()) throw InputError("this command requires --set FILE");
    return parse_set_json(read_file(cfg.set_path));
}

Direction need_direction(const RunConfig& cfg) {
    if (cfg.direction.empty()) throw InputError("this command requires --direction \"x,y,...\"");
    return Direction(parse_csv_numbers(cfg.direction));
}

QuadratureConfig quad_config(const RunConfig& cfg) {
    QuadratureConfig q;
    q.rel_tol = cfg.rel_tol;
    q.validate();
    return q;
}

int cmd_measure(const RunConfig& cfg) {
    const SpdMatrix a = need_matrix(cfg);
    const SetRegion e = need_set(cfg);
    const QuadratureConfig q = quad_config(cfg);
    JsonWriter w;
    w.begin_object().key("command").value(cfg.command);
    if (cfg.command == "measure") {
        measure_result_json(w, "mass", mass(a, e, q));
    } else if (cfg.command == "perimeter") {
        measure_result_json(w, "perimeter", perimeter(a, e, q));
    } else {
        w.key("barycenter").vector_value(barycenter(a, e, q));
    }
    echo_config(w, cfg);
    w.end_object();
    emit(cfg, w.str());
    return 0;
}

int cmd_symmetrize(const RunConfig& cfg) {
    const SpdMatrix a = need_matrix(cfg);
    const SetRegion e = need_set(cfg);
    const Direction u = need_direction(cfg);
    const QuadratureConfig q = quad_config(cfg);
    const GridSpec grid{cfg.grid};
    const SymmetrizationReport rep = symmetrization_report(a, e, u, q, grid);
    const SubgraphRegion sym = ehrhard_symmetrize(a, e, u, grid, q);

    JsonWriter w;
    w.begin_object().key("command").value(std::string("symmetrize"));
    w.key("mass_before").value(rep.mass_before);
    w.key("mass_after").value(rep.mass_after);
    w.key("mass_error").value(rep.mass_error);
    measure_result_json(w, "perimeter_before", rep.perimeter_before);
    measure_result_json(w, "perimeter_after", rep.perimeter_after);
    w.key("barycenter_before").vector_value(rep.barycenter_before);
    w.key("barycenter_after").vector_value(rep.barycenter_after);
    w.key("error_term").value(rep.error_term);
    w.key("thm12_slack").value(rep.thm12_slack);
    w.key("slice_samples").value(rep.slice_samples);
    w.key("slice_decrease_violations").value(rep.slice_decrease_violations);
    w.key("direction_gradient").vector_value(rep.direction_gradient);
    w.key("direction_is_eigen").value(rep.direction_is_eigen);
    w.key("symmetrized_set").raw(set_to_json(SetRegion(sym)));
    echo_config(w, cfg);
    w.end_object();
    emit(cfg, w.str());

    if (!cfg.csv_path.empty()) {
        const SpdMatrix arot = conjugate(a, sym.rotation());
        const Direction axis(sym.rotation().column(sym.dim() - 1));
        std::string csv = sym.base_dim() == 1 ? "z,h,p_E,p_Es\n" : "z1,z2,h,p_E,p_Es\n";
        std::vector<int> idx(sym.base_dim(), 0);
        bool more = true;
        while (more) {
            Vector zb(sym.base_dim());
            for (int ax = 0; ax < sym.base_dim(); ++ax) zb[ax] = sym.node_coord(ax, idx[ax]);
            Vector zw(sym.dim(), 0.0);
            for (int ax = 0; ax < sym.base_dim(); ++ax) zw = zw + zb[ax] * sym.rotation().column(ax);
            double alpha = arot.entries()(sym.dim() - 1, sym.dim() - 1), beta = 0.0, gamma = 0.0;
            for (int j = 0; j < sym.base_dim(); ++j) {
                beta += arot.entries()(sym.dim() - 1, j) * zb[j];
                for (int i = 0; i < sym.base_dim(); ++i) gamma += arot.entries()(i, j) * zb[i] * zb[j];
            }
            const LineGaussian line(alpha, beta, gamma);
            const double h = sym.height_at_node(idx);
            const double p_e = slice_perimeter(line, slice(e, zw, axis));
            const double p_es = std::isfinite(h) ? line.weight(h) : 0.0;
            std::string row;
            for (int ax = 0; ax < sym.base_dim(); ++ax) row += format_double(zb[ax]) + ",";
            row += format_double(h) + "," + format_double(p_e) + "," + format_double(p_es) + "\n";
            csv += row;
            int ax = 0;
            while (ax < sym.base_dim()) {
                if (++idx[ax] < sym.nodes()[ax]) break;
                idx[ax] = 0;
                ++ax;
            }
            if (ax == sym.base_dim()) more = false;
        }
        write_file(cfg.csv_path, csv);
    }

    const double tol = 10.0 * (rep.perimeter_before.error_estimate + rep.perimeter_after.error_estimate +
                               rep.mass_error) +
                       1e-12;
    if (rep.thm12_slack < -tol) {
        std::cerr << "violation: symmetrization slack " << rep.thm12_slack << " below -" << tol << "\n";
        return 2;
    }
    return 0;
}

int cmd_iso_check(const RunConfig& cfg) {
    const SpdMatrix a = need_matrix(cfg);
    const SetRegion e = need_set(cfg);
    const IsoResult res = iso_check(a, e, quad_config(cfg));
    JsonWriter w;
    w.begin_object().key("command").value(std::string("iso-check"));
    w.key("mass").value(res.mass);
    measure_result_json(w, "perimeter", res.perimeter);
    w.key("bound").value(res.bound);
    w.key("deficit").value(res.deficit);
    echo_config(w, cfg);
    w.end_object();
    emit(cfg, w.str());

    if (!cfg.csv_path.empty()) {
        // deficit-vs-mass curve: the flattest direction attains the bound,
        // the steepest direction shows the largest half-space deficit
        const Direction steep(a.eigenvector(a.dim() - 1));
        std::string csv = "mass,bound,flat_deficit,steep_deficit\n";
        for (int k = 1; k <= 39; ++k) {
            const double m = k / 40.0;
            const double bound = iso_bound(a, m);
            const HalfSpaceSet flat = extremal_halfspace(a, m);
            const double s = norm(a.sqrt_inv_entries() * steep.components());
            const HalfSpaceSet steep_h(steep, std_normal_quantile(m) * s);
            csv += format_double(m) + "," + format_double(bound) + "," +
                   format_double(halfspace_perimeter(a, flat).value - bound) + "," +
                   format_double(halfspace_perimeter(a, steep_h).value - bound) + "\n";
        }
        write_file(cfg.csv_path, csv);
    }

    if (res.deficit < -10.0 * res.perimeter.error_estimate - 1e-12) {
        std::cerr << "violation: isoperimetric deficit " << res.deficit << "\n";
        return 2;
    }
    return 0;
}

int cmd_enlarge_check(const RunConfig& cfg) {
    const SpdMatrix a = need_matrix(cfg);
    const SetRegion e = need_set(cfg);
    const QuadratureConfig q = quad_config(cfg);
    if (!(cfg.epsilon > 0)) throw InputError("enlarge-check requires --epsilon > 0");
    const SetRegion enlarged = minkowski_enlarge(e, cfg.epsilon);
    const double m0 = mass(a, e, q).value;
    const double m1 = mass(a, enlarged, q).value;
    const double lhs = std_normal_quantile(std::min(m1, 1.0 - 1e-16)) -
                       std_normal_quantile(std::min(m0, 1.0 - 1e-16));
    const double rhs = cfg.epsilon / a.sqrt_inv_norm();
    JsonWriter w;
    w.begin_object().key("command").value(std::string("enlarge-check"));
    w.key("mass").value(m0);
    w.key("mass_enlarged").value(m1);
    w.key("quantile_gain").value(lhs);
    w.key("required_gain").value(rhs);
    w.key("slack").value(lhs - rhs);
    echo_config(w, cfg);
    w.end_object();
    emit(cfg, w.str());
    if (lhs - rhs < -1e-7) {
        std::cerr << "violation: enlargement gain " << lhs << " below " << rhs << "\n";
        return 2;
    }
    return 0;
}

int cmd_counterexample(const RunConfig& cfg) {
    const QuadratureConfig q = quad_config(cfg);
    const std::vector<double> alphas = parse_csv_numbers(cfg.alphas);
    const CounterexampleScan scan =
        counterexample_scan(cfg.ce_a, cfg.ce_b, cfg.ce_c, alphas, q, std::max(cfg.grid, 401) | 1);

    JsonWriter w;
    w.begin_object().key("command").value(std::string("counterexample"));
    w.key("a").value(cfg.ce_a);
    w.key("b").value(cfg.ce_b);
    w.key("c").value(cfg.ce_c);
    w.key("rows").begin_array();
    for (const CounterexampleRow& r : scan.rows) {
        w.begin_object();
        w.key("alpha").value(r.alpha);
        w.key("P_E").value(r.perimeter_e);
        w.key("P_Es").value(r.perimeter_es);
        w.key("error_term").value(r.error_term);
        w.key("slope1").value(r.slope1);
        w.key("slope2").value(r.slope2);
        w.end_object();
    }
    w.end_array();
    w.key("slope1_extrapolated").value(scan.slope1_extrapolated);
    w.key("slope2_extrapolated").value(scan.slope2_extrapolated);
    w.key("error_term_slope_extrapolated").value(scan.error_term_slope_extrapolated);
    w.key("slope1_analytic").value(scan.slope1_analytic);
    w.key("slope2_analytic").value(scan.slope2_analytic);
    w.key("error_term_slope_analytic").value(scan.error_term_slope_analytic);
    w.key("strict_increase").value(scan.strict_increase_everywhere);
    w.key("h0").value(scan.h0);
    w.key("h_prime_0").value(scan.h_prime_0);
    echo_config(w, cfg);
    w.end_object();
    emit(cfg, w.str());

    if (!cfg.csv_path.empty()) {
        std::string csv = "alpha,P_E,P_Es,error_term,slope1,slope2\n";
        for (const CounterexampleRow& r : scan.rows) {
            csv += format_double(r.alpha) + "," + format_double(r.perimeter_e) + "," +
                   format_double(r.perimeter_es) + "," + format_double(r.error_term) + "," +
                   format_double(r.slope1) + "," + format_double(r.slope2) + "\n";
        }
        write_file(cfg.csv_path, csv);
    }

    for (const CounterexampleRow& r : scan.rows) {
        if (r.error_term + r.perimeter_e - r.perimeter_es < -1e-7) {
            std::cerr << "violation: barycenter bound fails at alpha " << r.alpha << "\n";
            return 2;
        }
    }
    return 0;
}

int cmd_direction_audit(const RunConfig& cfg) {
    const SpdMatrix a = need_matrix(cfg);
    const Direction u = need_direction(cfg);
    const QuadratureConfig q = quad_config(cfg);
    const Vector grad = direction_gradient(a, u);
    const auto eigen = eigenspace_membership(a, u, 1e-9);

    // thin-box probe in the rotated frame of u
    const int n = a.dim();
    const double alpha = 0.05;
    Vector lo(n, -alpha), hi(n, alpha);
    lo[n - 1] = 0.0;
    hi[n - 1] = std::numeric_limits<double>::infinity();
    const Rotation o = rotation_to_minus_en(u);
    const SetRegion thin = transform(SetRegion(BoxSet(lo, hi)), o.entries());
    const SymmetrizationReport rep = symmetrization_report(a, thin, u, q, GridSpec{std::max(cfg.grid, 257) | 1});

    JsonWriter w;
    w.begin_object().key("command").value(std::string("direction-audit"));
    w.key("direction").vector_value(u.components());
    w.key("gradient").vector_value(grad);
    w.key("gradient_norm").value(norm(grad));
    w.key("is_eigen").value(eigen.has_value());
    if (eigen) w.key("eigenvalue").value(*eigen);
    w.key("thin_box_alpha").value(alpha);
    measure_result_json(w, "perimeter_before", rep.perimeter_before);
    measure_result_json(w, "perimeter_after", rep.perimeter_after);
    w.key("thm12_slack").value(rep.thm12_slack);
    echo_config(w, cfg);
    w.end_object();
    emit(cfg, w.str());

    const double tol =
        10.0 * (rep.perimeter_before.error_estimate + rep.perimeter_after.error_estimate) + 1e-12;
    if (eigen && rep.perimeter_after.value > rep.perimeter_before.value + tol) {
        std::cerr << "violation: eigen direction with increasing perimeter\n";
        return 2;
    }
    return 0;
}

int cmd_oracle(const RunConfig& cfg) {
    const SpdMatrix a = need_matrix(cfg);
    const SetRegion e = need_set(cfg);
    const McEstimate m = mc_mass(a, e, cfg.samples, cfg.seed);
    const std::vector<McEstimate> b = mc_barycenter(a, e, cfg.samples, cfg.seed + 1);

    JsonWriter w;
    w.begin_object().key("command").value(std::string("oracle"));
    w.key("mass").begin_object();
    w.key("value").value(m.value);
    w.key("std_error").value(m.std_error);
    w.key("n_samples").value(static_cast<long long>(m.n_samples));
    w.key("seed").value(static_cast<unsigned long long>(m.seed));
    w.end_object();
    w.key("barycenter").begin_array();
    for (const McEstimate& c : b) {
        w.begin_object();
        w.key("value").value(c.value);
        w.key("std_error").value(c.std_error);
        w.end_object();
    }
    w.end_array();
    if (e.dim() == 2 && cfg.grid >= 64) {
        w.key("grid_perimeter").value(grid_perimeter_2d(a, e, cfg.grid));
        w.key("grid_resolution").value(cfg.grid);
    }
    echo_config(w, cfg);
    w.end_object();
    emit(cfg, w.str());
    return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
    try {
        if (cfg.command == "measure" || cfg.command == "perimeter" || cfg.command == "barycenter")
            return cmd_measure(cfg);
        if (cfg.command == "symmetrize") return cmd_symmetrize(cfg);
        if (cfg.command == "iso-check") return cmd_iso_check(cfg);
        if (cfg.command == "enlarge-check") return cmd_enlarge_check(cfg);
        if (cfg.command == "counterexample") return cmd_counterexample(cfg);
        if (cfg.command == "direction-audit") return cmd_direction_audit(cfg);
        if (cfg.command == "oracle") return cmd_oracle(cfg);
        std::cerr << "unknown command: " << cfg.command << "\n";
        return 1;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace aniso
