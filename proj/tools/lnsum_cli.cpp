// lnsum command-line front end: model ingestion, forward-transform tables,
// inversion tables, method comparison, figure data, segmentation, sampling.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lnsum/lnsum.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct cli_error {
    int code;
    std::string msg;
};

[[noreturn]] void fail(int code, const std::string& msg) {
    throw cli_error{code, msg};
}

int exit_code_for(int status) {
    switch (status) {
        case LNSUM_OK: return 0;
        case LNSUM_EINVAL:
        case LNSUM_EIO: return kExitConfig;
        default: return kExitNumeric;
    }
}

void check(int status) {
    if (status != LNSUM_OK) fail(exit_code_for(status), lnsum_last_error());
}

using model_ptr = std::unique_ptr<lnsum_model, decltype(&lnsum_model_free)>;

model_ptr load_model(const std::string& path) {
    if (path.empty()) fail(kExitConfig, "a model file is required (--model)");
    lnsum_model* raw = nullptr;
    check(lnsum_model_parse_file(path.c_str(), &raw));
    return model_ptr(raw, &lnsum_model_free);
}

model_ptr make_single(double mu, double sigma) {
    lnsum_model* raw = nullptr;
    check(lnsum_model_create(&mu, &sigma, 1, &raw));
    return model_ptr(raw, &lnsum_model_free);
}

struct GridSpec {
    double min = 0.0, max = 0.0;
    int count = 0;
    bool log_spacing = false;
};

std::vector<double> make_grid(const GridSpec& g) {
    if (g.count < 2 || !(g.min < g.max))
        fail(kExitConfig, "grid requires min < max and count >= 2");
    if (g.log_spacing && !(g.min > 0.0))
        fail(kExitConfig, "log grid requires positive min");
    std::vector<double> xs(g.count);
    for (int i = 0; i < g.count; ++i) {
        double t = static_cast<double>(i) / (g.count - 1);
        xs[i] = g.log_spacing ? g.min * std::pow(g.max / g.min, t)
                              : g.min + t * (g.max - g.min);
    }
    return xs;
}

// Comma-delimited table: one header row, data rows, '#'-prefixed footers.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> footers;

    void write(const std::string& out_path) const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i)
            os << (i ? "," : "") << header[i];
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", row[i]);
                os << (i ? "," : "") << buf;
            }
            os << "\n";
        }
        for (const auto& f : footers) os << "# " << f << "\n";
        if (out_path.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream f(out_path);
            if (!f) fail(kExitConfig, "cannot open output file: " + out_path);
            f << os.str();
        }
    }
};

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct Options {
    std::string model_path, out_path, method = "davies", engine = "gh";
    GridSpec grid{0.05, 20.0, 200, true};
    int N = 0, K = 0, segments = 4;
    double c = 0.0, L = 0.0, d = 0.0;
    std::uint64_t seed = 1;
    int figure = 1;
    std::size_t samples = 1000;
};

void add_grid_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--grid-min", o.grid.min, "grid start");
    cmd->add_option("--grid-max", o.grid.max, "grid end");
    cmd->add_option("--grid-count", o.grid.count, "grid point count");
    cmd->add_flag("--grid-log", o.grid.log_spacing, "logarithmic spacing");
}

lnsum_invert_opts invert_opts(const Options& o) {
    lnsum_invert_opts io;
    lnsum_invert_opts_default(&io);
    io.N = o.N;
    io.K = o.K;
    io.c = o.c;
    io.L = o.L;
    io.d = o.d;
    io.segments = o.segments;
    io.seed = o.seed;
    return io;
}

void run_transform(const Options& o) {
    model_ptr m = load_model(o.model_path);
    std::vector<std::string> engines = split_csv(o.engine);
    if (engines.empty()) fail(kExitConfig, "no engine named");
    std::vector<double> grid = make_grid(o.grid);
    // holgate lives on the imaginary axis; everything else is tabulated on s
    auto axis_of = [](const std::string& e) { return e == "holgate" ? 1 : 0; };

    Table t;
    t.header = {"s"};
    for (const auto& e : engines) {
        t.header.push_back(e + "_re");
        t.header.push_back(e + "_im");
    }
    std::vector<std::vector<double>> cols(2 * engines.size(),
                                          std::vector<double>(grid.size()));
    for (std::size_t ei = 0; ei < engines.size(); ++ei) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double re = 0.0, im = 0.0;
            check(lnsum_transform(m.get(), engines[ei].c_str(),
                                  axis_of(engines[ei]), grid[i], o.N, &re, &im));
            cols[2 * ei][i] = re;
            cols[2 * ei + 1][i] = im;
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& col : cols) row.push_back(col[i]);
        t.rows.push_back(std::move(row));
    }
    // pairwise max relative difference across engines sharing the real axis
    for (std::size_t a = 0; a < engines.size(); ++a) {
        for (std::size_t b = a + 1; b < engines.size(); ++b) {
            if (axis_of(engines[a]) != axis_of(engines[b])) continue;
            double worst = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double va = cols[2 * a][i], vb = cols[2 * b][i];
                double den = std::max({std::fabs(va), std::fabs(vb), 1e-300});
                worst = std::max(worst, std::fabs(va - vb) / den);
            }
            t.footers.push_back("max_rel_diff " + engines[a] + " vs " +
                                engines[b] + ": " + fmt("%.6e", worst));
        }
    }
    t.write(o.out_path);
}

void run_invert(const Options& o) {
    model_ptr m = load_model(o.model_path);
    std::vector<double> xs = make_grid(o.grid);
    std::vector<double> cdf(xs.size()), raw(xs.size()), pdf(xs.size());
    lnsum_invert_opts io = invert_opts(o);
    check(lnsum_invert(m.get(), o.method.c_str(), xs.data(), xs.size(), &io,
                       cdf.data(), raw.data(), pdf.data()));
    Table t;
    t.header = {"x", "cdf", "pdf", "cdf_raw"};
    for (std::size_t i = 0; i < xs.size(); ++i)
        t.rows.push_back({xs[i], cdf[i], pdf[i], raw[i]});

    int ncomp = 0;
    check(lnsum_model_size(m.get(), &ncomp));
    if (ncomp == 1) {
        double worst_cdf = 0.0;
        bool have_cdf = false;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::isnan(cdf[i])) continue;
            double ref = 0.0;
            check(lnsum_ref_cdf(m.get(), xs[i], &ref));
            worst_cdf = std::max(worst_cdf, std::fabs(cdf[i] - ref));
            have_cdf = true;
        }
        if (have_cdf)
            t.footers.push_back("max_abs_cdf_error_vs_closed_form: " +
                                fmt("%.6e", worst_cdf));
    }
    t.footers.push_back("method: " + o.method);
    t.write(o.out_path);
}

void run_compare(const Options& o) {
    model_ptr m = load_model(o.model_path);
    std::vector<std::string> methods = split_csv(o.method);
    if (methods.size() < 2) fail(kExitConfig, "compare needs >= 2 methods");
    std::vector<double> xs = make_grid(o.grid);
    int ncomp = 0;
    check(lnsum_model_size(m.get(), &ncomp));

    // reference CDF: closed form for one component, Monte Carlo otherwise
    std::vector<double> ref(xs.size());
    if (ncomp == 1) {
        for (std::size_t i = 0; i < xs.size(); ++i)
            check(lnsum_ref_cdf(m.get(), xs[i], &ref[i]));
    } else {
        const std::size_t n_mc = 1000000;
        std::vector<double> samples(n_mc);
        check(lnsum_sample(m.get(), o.seed, n_mc, samples.data()));
        std::sort(samples.begin(), samples.end());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            auto it = std::upper_bound(samples.begin(), samples.end(), xs[i]);
            ref[i] = static_cast<double>(it - samples.begin()) / n_mc;
        }
    }

    Table t;
    t.header = {"x", "reference"};
    std::vector<std::vector<double>> cols;
    for (const auto& method : methods) {
        std::vector<double> cdf(xs.size());
        lnsum_invert_opts io = invert_opts(o);
        auto t0 = std::chrono::steady_clock::now();
        check(lnsum_invert(m.get(), method.c_str(), xs.data(), xs.size(), &io,
                           cdf.data(), nullptr, nullptr));
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        double worst = 0.0, mean = 0.0;
        int counted = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::isnan(cdf[i])) continue;
            double e = std::fabs(cdf[i] - ref[i]);
            worst = std::max(worst, e);
            mean += e;
            ++counted;
        }
        if (counted) mean /= counted;
        t.header.push_back(method);
        cols.push_back(std::move(cdf));
        t.footers.push_back(method + ": max_abs_err=" + fmt("%.6e", worst) +
                            " mean_abs_err=" + fmt("%.6e", mean) +
                            " wall_ms=" + fmt("%.3f", ms));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<double> row{xs[i], ref[i]};
        for (const auto& col : cols) row.push_back(col[i]);
        t.rows.push_back(std::move(row));
    }
    t.write(o.out_path);
}

void run_figures(const Options& o) {
    const std::vector<double> sigmas{0.5, 1.0, 2.0};
    Table t;
    switch (o.figure) {
        case 1: {
            // M, M1, M2 against s per sigma
            t.header = {"s"};
            for (double sg : sigmas) {
                std::string tag = "s" + fmt("%g", sg);
                t.header.push_back("M_" + tag);
                t.header.push_back("M1_" + tag);
                t.header.push_back("M2_" + tag);
            }
            for (double s : make_grid({0.01, 50.0, 200, true})) {
                std::vector<double> row{s};
                for (double sg : sigmas) {
                    model_ptr m = make_single(0.0, sg);
                    double re = 0.0, im = 0.0, m1 = 0.0, m2 = 0.0;
                    check(lnsum_transform(m.get(), "reduced_range", 0, s, 0, &re,
                                          &im));
                    check(lnsum_mgf_split(m.get(), s, o.N, &m1, &m2));
                    row.insert(row.end(), {re, m1, m2});
                }
                t.rows.push_back(std::move(row));
            }
            break;
        }
        case 2: {
            t.header = {"omega"};
            for (double sg : sigmas) {
                std::string tag = "s" + fmt("%g", sg);
                t.header.push_back("chf_re_" + tag);
                t.header.push_back("chf_im_" + tag);
            }
            for (double w : make_grid({0.01, 20.0, 300, true})) {
                std::vector<double> row{w};
                for (double sg : sigmas) {
                    model_ptr m = make_single(0.0, sg);
                    double re = 0.0, im = 0.0;
                    check(lnsum_transform(m.get(), "asymptotic_gh", 1, w, 0, &re,
                                          &im));
                    row.insert(row.end(), {re, im});
                }
                t.rows.push_back(std::move(row));
            }
            break;
        }
        case 3: {
            t.header = {"s", "d1", "d2", "d3", "d4"};
            model_ptr m = make_single(0.0, 1.0);
            for (double s : make_grid({0.01, 10.0, 200, true})) {
                std::vector<double> row{s};
                for (int k = 1; k <= 4; ++k) {
                    double v = 0.0;
                    check(lnsum_mgf_derivative(m.get(), s, k, &v));
                    row.push_back(v);
                }
                t.rows.push_back(std::move(row));
            }
            break;
        }
        case 4: {
            t.header = {"omega"};
            for (double sg : sigmas) {
                std::string tag = "s" + fmt("%g", sg);
                t.header.push_back("X1_" + tag);
                t.header.push_back("X2_" + tag);
            }
            std::vector<double> omegas = make_grid({1e-4, 40.0, 400, true});
            std::vector<std::vector<double>> X1s, X2s;
            for (double sg : sigmas) {
                model_ptr m = make_single(0.0, sg);
                std::vector<double> X1(omegas.size()), X2(omegas.size());
                check(lnsum_cumulants(m.get(), omegas.data(), omegas.size(),
                                      X1.data(), X2.data(), nullptr, nullptr,
                                      nullptr, nullptr));
                X1s.push_back(std::move(X1));
                X2s.push_back(std::move(X2));
            }
            for (std::size_t i = 0; i < omegas.size(); ++i) {
                std::vector<double> row{omegas[i]};
                for (std::size_t k = 0; k < sigmas.size(); ++k)
                    row.insert(row.end(), {X1s[k][i], X2s[k][i]});
                t.rows.push_back(std::move(row));
            }
            break;
        }
        case 5: {
            // segmented piecewise inversion against Davies on a 3-term sum
            model_ptr m = o.model_path.empty() ? model_ptr(nullptr, &lnsum_model_free)
                                               : load_model(o.model_path);
            if (!m) {
                double mu[3] = {0.0, 0.3, -0.2};
                double sg[3] = {0.5, 1.0, 1.5};
                lnsum_model* raw = nullptr;
                check(lnsum_model_create(mu, sg, 3, &raw));
                m = model_ptr(raw, &lnsum_model_free);
            }
            std::vector<double> xs = make_grid({0.05, 60.0, 200, true});
            std::vector<double> piece(xs.size()), davies(xs.size());
            lnsum_invert_opts io = invert_opts(o);
            check(lnsum_invert(m.get(), "piecewise", xs.data(), xs.size(), &io,
                               piece.data(), nullptr, nullptr));
            check(lnsum_invert(m.get(), "davies", xs.data(), xs.size(), &io,
                               davies.data(), nullptr, nullptr));
            t.header = {"x", "piecewise_cdf", "davies_cdf"};
            double worst = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                t.rows.push_back({xs[i], piece[i], davies[i]});
                worst = std::max(worst, std::fabs(piece[i] - davies[i]));
            }
            t.footers.push_back("max_abs_difference: " + fmt("%.6e", worst));
            break;
        }
        case 6: {
            model_ptr m = make_single(0.0, 2.0);
            std::vector<double> xs = make_grid({0.1, 50.0, 200, true});
            std::vector<double> fit(xs.size());
            lnsum_invert_opts io = invert_opts(o);
            if (io.K == 0) io.K = 8;
            check(lnsum_invert(m.get(), "arctan", xs.data(), xs.size(), &io,
                               fit.data(), nullptr, nullptr));
            t.header = {"x", "arctan_cdf", "closed_cdf", "difference"};
            double worst = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                double ref = 0.0;
                check(lnsum_ref_cdf(m.get(), xs[i], &ref));
                t.rows.push_back({xs[i], fit[i], ref, fit[i] - ref});
                worst = std::max(worst, std::fabs(fit[i] - ref));
            }
            t.footers.push_back("max_abs_difference: " + fmt("%.6e", worst));
            break;
        }
        default:
            fail(kExitConfig, "figure id must be 1..6");
    }
    t.write(o.out_path);
}

void run_segments(const Options& o) {
    model_ptr m = load_model(o.model_path);
    int ns = o.segments;
    std::vector<double> lo(ns), hi(ns), a(ns), b(ns), X1(ns), X2(ns);
    check(lnsum_segment_plan(m.get(), ns, lo.data(), hi.data(), a.data(),
                             b.data(), X1.data(), X2.data()));
    Table t;
    t.header = {"segment", "lo", "hi", "a", "b", "X1_lo", "X2_lo"};
    for (int i = 0; i < ns; ++i)
        t.rows.push_back({static_cast<double>(i), lo[i], hi[i], a[i], b[i],
                          X1[i], X2[i]});

    int K = o.K > 0 ? o.K : 8;
    int max_terms = K + 8;
    std::vector<double> A(max_terms), ta(max_terms), tb(max_terms);
    int terms = 0;
    double residual = 0.0;
    check(lnsum_fit_arctan(m.get(), K, max_terms, A.data(), ta.data(), tb.data(),
                           &terms, &residual));
    for (int k = 0; k < terms; ++k)
        t.footers.push_back("term " + std::to_string(k) + ": A=" +
                            fmt("%.10g", A[k]) + " a=" + fmt("%.10g", ta[k]) +
                            " b=" + fmt("%.10g", tb[k]));
    t.footers.push_back("fit_residual: " + fmt("%.6e", residual));
    t.write(o.out_path);
}

void run_mc(const Options& o) {
    model_ptr m = load_model(o.model_path);
    std::vector<double> samples(o.samples);
    check(lnsum_sample(m.get(), o.seed, samples.size(), samples.data()));
    Table t;
    t.header = {"index", "value"};
    for (std::size_t i = 0; i < samples.size(); ++i)
        t.rows.push_back({static_cast<double>(i), samples[i]});
    t.footers.push_back("seed: " + std::to_string(o.seed));
    t.write(o.out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sums of lognormals: transforms, inversion, fitting"};
    app.require_subcommand(1);
    Options o;

    CLI::App* c_tr = app.add_subcommand("transform", "tabulate forward transforms");
    c_tr->add_option("--model", o.model_path, "model file");
    c_tr->add_option("--out", o.out_path, "output file (default stdout)");
    c_tr->add_option("--engine", o.engine, "engine name(s), comma separated");
    c_tr->add_option("--N", o.N, "quadrature order");
    add_grid_flags(c_tr, o);

    CLI::App* c_inv = app.add_subcommand("invert", "invert to CDF/pdf tables");
    c_inv->add_option("--model", o.model_path, "model file");
    c_inv->add_option("--out", o.out_path, "output file (default stdout)");
    c_inv->add_option("--method", o.method, "inversion method");
    c_inv->add_option("--N", o.N, "method order");
    c_inv->add_option("--K", o.K, "term count");
    c_inv->add_option("--c", o.c, "fourier contour abscissa");
    c_inv->add_option("--L", o.L, "fourier half-period");
    c_inv->add_option("--d", o.d, "davies grid spacing");
    c_inv->add_option("--segments", o.segments, "piecewise segment count");
    c_inv->add_option("--seed", o.seed, "random seed");
    add_grid_flags(c_inv, o);

    CLI::App* c_cmp = app.add_subcommand("compare", "cross-method comparison");
    c_cmp->add_option("--model", o.model_path, "model file");
    c_cmp->add_option("--out", o.out_path, "output file (default stdout)");
    c_cmp->add_option("--method", o.method, "methods, comma separated");
    c_cmp->add_option("--N", o.N, "method order");
    c_cmp->add_option("--K", o.K, "term count");
    c_cmp->add_option("--c", o.c, "fourier contour abscissa");
    c_cmp->add_option("--L", o.L, "fourier half-period");
    c_cmp->add_option("--d", o.d, "davies grid spacing");
    c_cmp->add_option("--segments", o.segments, "piecewise segment count");
    c_cmp->add_option("--seed", o.seed, "Monte Carlo seed");
    add_grid_flags(c_cmp, o);

    CLI::App* c_fig = app.add_subcommand("figures", "emit figure data 1..6");
    c_fig->add_option("id", o.figure, "figure id (1..6)")->required();
    c_fig->add_option("--model", o.model_path, "model file (figure 5)");
    c_fig->add_option("--out", o.out_path, "output file (default stdout)");
    c_fig->add_option("--N", o.N, "quadrature order");
    c_fig->add_option("--K", o.K, "term count (figure 6)");
    c_fig->add_option("--segments", o.segments, "segment count (figure 5)");

    CLI::App* c_seg = app.add_subcommand("segments", "emit segment plan and fit");
    c_seg->add_option("--model", o.model_path, "model file");
    c_seg->add_option("--out", o.out_path, "output file (default stdout)");
    c_seg->add_option("--segments", o.segments, "segment count");
    c_seg->add_option("--K", o.K, "arctan term count");

    CLI::App* c_mc = app.add_subcommand("mc", "emit raw Monte Carlo samples");
    c_mc->add_option("--model", o.model_path, "model file");
    c_mc->add_option("--out", o.out_path, "output file (default stdout)");
    c_mc->add_option("--N", o.samples, "sample count");
    c_mc->add_option("--seed", o.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (c_tr->parsed()) run_transform(o);
        if (c_inv->parsed()) run_invert(o);
        if (c_cmp->parsed()) run_compare(o);
        if (c_fig->parsed()) run_figures(o);
        if (c_seg->parsed()) run_segments(o);
        if (c_mc->parsed()) run_mc(o);
    } catch (const cli_error& e) {
        std::cerr << "error: " << e.msg << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
