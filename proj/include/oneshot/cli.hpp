#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "oneshot/asymptotics.hpp"
#include "oneshot/binning.hpp"
#include "oneshot/distortion.hpp"
#include "oneshot/errors.hpp"
#include "oneshot/helper.hpp"
#include "oneshot/io.hpp"
#include "oneshot/rate_distortion.hpp"
#include "oneshot/rng.hpp"
#include "oneshot/smooth.hpp"

namespace oneshot::cli {

// All numbers in CLI output go through here: 12 significant digits, so a
// fixed config and seed reproduce byte-identical files.
inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail_cli {

// Index-parallel map with deterministic assembly; worker w owns the indices
// it grabs, results land by index.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string out_path;
    bool renormalize = false;
    int threads = 1;
};

inline void emit(const GlobalOpts& g, std::ostream& fallback, const std::string& text) {
    if (g.out_path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream file(g.out_path);
    if (!file) throw io_error("cannot write " + g.out_path);
    file << text;
}

inline std::string smooth_json(double value_bits, double eps,
                               std::optional<double> witness_total) {
    std::string s = "{\"value_bits\":" + fmt12(value_bits) + ",\"eps\":" + fmt12(eps) +
                    ",\"witness_total_mass\":";
    s += witness_total ? fmt12(*witness_total) : std::string("null");
    s += "}\n";
    return s;
}

} // namespace detail_cli

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using detail_cli::GlobalOpts;
    CLI::App app{"Exact smooth Renyi calculators and one-shot source-coding experiments"};
    app.name("oneshot");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Master seed; trial t uses stream (seed, t)");
    app.add_option("--out", g.out_path, "Write output to this file instead of stdout");
    app.add_flag("--renormalize", g.renormalize, "Rescale input masses whose total is off");
    app.add_option("--threads", g.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

    // ----- smooth ------------------------------------------------------------
    auto* smooth_cmd = app.add_subcommand("smooth", "Smooth Renyi quantities of one input");
    std::string sm_dist, sm_dist2, sm_joint, sm_distortion, sm_quantity;
    double sm_eps = 0.0;
    smooth_cmd->add_option("--dist", sm_dist, "Distribution file (h0, dinf)");
    smooth_cmd->add_option("--dist2", sm_dist2, "Second distribution file (dinf)");
    smooth_cmd->add_option("--joint", sm_joint, "Joint file (h0cond, iinf, quantile)");
    smooth_cmd->add_option("--distortion", sm_distortion, "Distortion file (quantile)");
    smooth_cmd->add_option("--eps", sm_eps, "Smoothing parameter");
    smooth_cmd->add_option("--quantity", sm_quantity, "One of h0, h0cond, dinf, iinf, quantile")
        ->required();

    // ----- sw-sim ------------------------------------------------------------
    auto* sw_cmd = app.add_subcommand("sw-sim", "Distributed codec sweep over random codebooks");
    std::string sw_joint;
    double sw_eps = 0.1;
    std::uint64_t sw_trials = 200;
    int sw_ell_a = -1, sw_ell_b = -1;
    sw_cmd->add_option("--joint", sw_joint, "Joint source file")->required();
    sw_cmd->add_option("--eps", sw_eps, "Target error budget")->required();
    sw_cmd->add_option("--trials", sw_trials, "Number of codebooks")->check(CLI::PositiveNumber);
    sw_cmd->add_option("--ellA", sw_ell_a, "Row-source rate override");
    sw_cmd->add_option("--ellB", sw_ell_b, "Column-source rate override");

    // ----- helper-sim ----------------------------------------------------------
    auto* helper_cmd = app.add_subcommand("helper-sim", "Coded side information schemes");
    std::string h_joint, h_kernel, h_scheme = "A";
    double h_eps_a = 0.0, h_eps_b = 0.0, h_eps_b_bar = -1.0;
    std::uint64_t h_trials = 100, h_source_trials = 1000;
    int h_ell_a = -1, h_ell_b = -1;
    helper_cmd->add_option("--joint", h_joint, "Joint source file")->required();
    helper_cmd->add_option("--kernel", h_kernel, "Auxiliary channel U|Y file")->required();
    helper_cmd->add_option("--scheme", h_scheme, "A (covering) or B (channel simulation)");
    helper_cmd->add_option("--epsA", h_eps_a, "Source-side budget")->required();
    helper_cmd->add_option("--epsB", h_eps_b, "Helper-side budget")->required();
    helper_cmd->add_option("--epsBbar", h_eps_b_bar,
                           "Inner helper budget for scheme A; default (epsB - 2 sqrt(epsA))/2");
    helper_cmd->add_option("--trials", h_trials, "Number of code realizations")
        ->check(CLI::PositiveNumber);
    helper_cmd->add_option("--source-trials", h_source_trials,
                           "Monte-Carlo source draws per scheme B realization");
    helper_cmd->add_option("--ellA", h_ell_a, "Rate override for the source message");
    helper_cmd->add_option("--ellB", h_ell_b, "Rate override for the helper message");

    // ----- rd-sim ----------------------------------------------------------------
    auto* rd_cmd = app.add_subcommand("rd-sim", "Lossy codebook sweep under max distortion");
    std::string rd_joint, rd_distortion;
    double rd_eps = 0.0, rd_eps1 = 0.0;
    std::uint64_t rd_trials = 200;
    int rd_ell_a = -1;
    rd_cmd->add_option("--joint", rd_joint, "Test channel joint file")->required();
    rd_cmd->add_option("--distortion", rd_distortion, "Distortion table file")->required();
    rd_cmd->add_option("--eps", rd_eps, "Excess probability budget")->required();
    rd_cmd->add_option("--eps1", rd_eps1, "Smoothing/quantile parameter")->required();
    rd_cmd->add_option("--trials", rd_trials, "Number of codebooks")->check(CLI::PositiveNumber);
    rd_cmd->add_option("--ellA", rd_ell_a, "Rate override");

    // ----- converge ------------------------------------------------------------
    auto* conv_cmd = app.add_subcommand("converge", "Normalized smoothed quantities on iid powers");
    std::string cv_base, cv_base2, cv_quantity;
    double cv_eps = 0.01, cv_alpha = 0.5;
    int cv_nmax = 8;
    conv_cmd->add_option("--base", cv_base, "Base file (joint for h0cond, else distribution)")
        ->required();
    conv_cmd->add_option("--base2", cv_base2, "Second distribution file (dinf, spectrum)");
    conv_cmd->add_option("--eps", cv_eps, "Smoothing parameter");
    conv_cmd->add_option("--nmax", cv_nmax, "Largest replication count")->check(CLI::PositiveNumber);
    conv_cmd->add_option("--alpha", cv_alpha, "Quantile level for spectrum");
    conv_cmd->add_option("--quantity", cv_quantity, "One of h0cond, dinf, spectrum")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (smooth_cmd->parsed()) {
            std::string text;
            if (sm_quantity == "h0") {
                if (sm_dist.empty()) throw validation_error("h0 needs --dist");
                const auto d = read_dist_file(sm_dist, g.renormalize);
                const SmoothResult r = smooth_h0(d.dist, sm_eps);
                text = detail_cli::smooth_json(r.value_bits, sm_eps, r.witness.total());
            } else if (sm_quantity == "h0cond") {
                if (sm_joint.empty()) throw validation_error("h0cond needs --joint");
                const auto j = read_joint_file(sm_joint, g.renormalize);
                const SmoothResult r = smooth_h0_cond(j.joint, sm_eps);
                text = detail_cli::smooth_json(r.value_bits, sm_eps, r.witness.total());
            } else if (sm_quantity == "dinf") {
                if (sm_dist.empty() || sm_dist2.empty())
                    throw validation_error("dinf needs --dist and --dist2");
                const auto p = read_dist_file(sm_dist, g.renormalize);
                const auto q = read_dist_file(sm_dist2, g.renormalize);
                const SmoothResult r = smooth_d_inf(p.dist, q.dist, sm_eps);
                text = detail_cli::smooth_json(r.value_bits, sm_eps, r.witness.total());
            } else if (sm_quantity == "iinf") {
                if (sm_joint.empty()) throw validation_error("iinf needs --joint");
                const auto j = read_joint_file(sm_joint, g.renormalize);
                const SmoothResult r = smooth_i_inf(j.joint, sm_eps);
                text = detail_cli::smooth_json(r.value_bits, sm_eps, r.witness.total());
            } else if (sm_quantity == "quantile") {
                if (sm_joint.empty() || sm_distortion.empty())
                    throw validation_error("quantile needs --joint and --distortion");
                const auto j = read_joint_file(sm_joint, g.renormalize);
                const auto dt = read_distortion_file(sm_distortion);
                const double v = max_distortion_quantile(j.joint, dt.table, sm_eps);
                text = detail_cli::smooth_json(v, sm_eps, std::nullopt);
            } else {
                throw validation_error("unknown quantity '" + sm_quantity + "'");
            }
            detail_cli::emit(g, out, text);
            return 0;
        }

        if (sw_cmd->parsed()) {
            const auto j = read_joint_file(sw_joint, g.renormalize);
            const SWRateBounds bounds = sw_rate_bounds(j.joint, sw_eps);
            auto [ell_a, ell_b] = sw_default_rates(bounds);
            if (sw_ell_a >= 0) ell_a = sw_ell_a;
            if (sw_ell_b >= 0) ell_b = sw_ell_b;
            std::vector<std::string> rows(sw_trials);
            detail_cli::parallel_for(sw_trials, g.threads, [&](std::size_t t) {
                RngStream rng(g.seed, t);
                const SWCode code = build_sw_code(j.joint, ell_a, ell_b, sw_eps, rng);
                const SWErrorBreakdown e = sw_exact_error(code, j.joint);
                rows[t] = std::to_string(t) + "," + std::to_string(ell_a) + "," +
                          std::to_string(ell_b) + "," + fmt12(e.report.error_prob) + "," +
                          fmt12(e.e1) + "," + fmt12(e.e2) + "," + fmt12(e.e3) + "," + fmt12(e.e4);
            });
            std::string text = "seed,ellA,ellB,exact_error,e1,e2,e3,e4\n";
            for (const auto& r : rows) text += r + "\n";
            detail_cli::emit(g, out, text);
            return 0;
        }

        if (helper_cmd->parsed()) {
            const auto j = read_joint_file(h_joint, g.renormalize);
            const auto k = read_kernel_file(h_kernel, g.renormalize);
            const HelperInstance inst(j.joint, k.kernel);
            std::string text;
            if (h_scheme == "A" || h_scheme == "a") {
                SchemeAParams params;
                params.eps_a = h_eps_a;
                params.eps_b = h_eps_b;
                params.eps_b_bar = h_eps_b_bar > 0.0
                                       ? h_eps_b_bar
                                       : (h_eps_b - 2.0 * std::sqrt(h_eps_a)) / 2.0;
                const SchemeARateBounds bounds = scheme_a_rate_bounds(inst, params);
                const int ell_a = h_ell_a >= 0 ? h_ell_a : bounds.ell_a_min;
                const int ell_b = h_ell_b >= 0 ? h_ell_b : bounds.ell_b_min;
                std::vector<std::string> rows(h_trials);
                detail_cli::parallel_for(h_trials, g.threads, [&](std::size_t t) {
                    RngStream rng(g.seed, t);
                    const SchemeACode code = build_scheme_a(inst, ell_a, ell_b, params, rng);
                    const SchemeAErrors e = scheme_a_exact_error(code, inst);
                    rows[t] = "A," + std::to_string(t) + "," + std::to_string(ell_a) + "," +
                              std::to_string(ell_b) + "," + fmt12(e.report.error_prob) + "," +
                              fmt12(e.e1) + "," + fmt12(e.e1c_and_e2) + "," + fmt12(e.e3) + "," +
                              fmt12(params.eps());
                });
                text = "scheme,seed,ellA,ellB,exact_error,e1,e1c_e2,e3,eps_budget\n";
                for (const auto& r : rows) text += r + "\n";
            } else if (h_scheme == "B" || h_scheme == "b") {
                const SchemeBRateBounds bounds = scheme_b_rate_bounds(inst, h_eps_a, h_eps_b);
                const int ell_a = h_ell_a >= 0 ? h_ell_a : bounds.ell_a_min;
                const int ell_b = h_ell_b >= 0 ? h_ell_b : bounds.ell_b_min;
                const double budget = 2.0 * h_eps_a + 4.0 * h_eps_b;
                std::vector<std::string> rows(h_trials);
                detail_cli::parallel_for(h_trials, g.threads, [&](std::size_t t) {
                    RngStream rng(g.seed, t);
                    const SchemeBCode code =
                        build_scheme_b(inst, ell_a, ell_b, h_eps_a, h_eps_b, rng);
                    const double exact = scheme_b_exact_error(code, inst).error_prob;
                    RngStream mc(g.seed ^ 0x5cb1f3a7u, t);
                    const double empirical =
                        h_source_trials > 0
                            ? scheme_b_empirical_error(inst, ell_a, ell_b, h_eps_a, h_eps_b,
                                                       h_source_trials, mc)
                                  .error_prob
                            : 0.0;
                    rows[t] = "B," + std::to_string(t) + "," + std::to_string(ell_a) + "," +
                              std::to_string(ell_b) + "," + fmt12(exact) + "," + fmt12(empirical) +
                              "," + std::to_string(h_source_trials) + "," + fmt12(budget);
                });
                text = "scheme,seed,ellA,ellB,exact_error,empirical_error,source_trials,eps_budget\n";
                for (const auto& r : rows) text += r + "\n";
            } else {
                throw validation_error("scheme must be A or B");
            }
            detail_cli::emit(g, out, text);
            return 0;
        }

        if (rd_cmd->parsed()) {
            const auto j = read_joint_file(rd_joint, g.renormalize);
            const auto dt = read_distortion_file(rd_distortion);
            require_same_shape(j.joint, dt.table);
            const int ell_a = rd_ell_a >= 0 ? rd_ell_a : rd_rate_bound(j.joint, rd_eps, rd_eps1);
            const double gamma = max_distortion_quantile(j.joint, dt.table, rd_eps1);
            const double bound = rd_average_bound(j.joint, rd_eps1, ell_a);
            std::vector<std::string> rows(rd_trials);
            detail_cli::parallel_for(rd_trials, g.threads, [&](std::size_t t) {
                RngStream rng(g.seed, t);
                const RDCode code = build_rd_code(j.joint, ell_a, rng);
                const double excess = rd_exact_excess_prob(code, j.joint, dt.table, gamma);
                rows[t] = std::to_string(t) + "," + std::to_string(ell_a) + "," + fmt12(gamma) +
                          "," + fmt12(excess) + "," + fmt12(bound);
            });
            std::string text = "seed,ellA,gamma,excess_prob,avg_bound\n";
            for (const auto& r : rows) text += r + "\n";
            detail_cli::emit(g, out, text);
            return 0;
        }

        if (conv_cmd->parsed()) {
            std::vector<ConvergencePoint> points;
            if (cv_quantity == "h0cond") {
                const auto base = read_joint_file(cv_base, g.renormalize);
                points = convergence_h0_cond(base.joint, cv_eps, cv_nmax);
            } else if (cv_quantity == "dinf") {
                if (cv_base2.empty()) throw validation_error("dinf needs --base2");
                const auto p = read_dist_file(cv_base, g.renormalize);
                const auto q = read_dist_file(cv_base2, g.renormalize);
                points = convergence_d_inf(p.dist, q.dist, cv_eps, cv_nmax);
            } else if (cv_quantity == "spectrum") {
                if (cv_base2.empty()) throw validation_error("spectrum needs --base2");
                const auto p = read_dist_file(cv_base, g.renormalize);
                const auto q = read_dist_file(cv_base2, g.renormalize);
                const double reference = kl_divergence(p.dist, q.dist);
                for (int n = 1; n <= cv_nmax; ++n) {
                    const FiniteDist pn = product_expand(p.dist, n);
                    const FiniteDist qn = product_expand(q.dist, n);
                    const double v = info_spectrum_quantile(pn, qn, cv_alpha, n);
                    points.push_back({n, v, reference, v - reference});
                }
            } else {
                throw validation_error("unknown quantity '" + cv_quantity + "'");
            }
            std::string text = "n,value,reference,gap\n";
            for (const auto& pt : points)
                text += std::to_string(pt.n) + "," + fmt12(pt.value_bits) + "," +
                        fmt12(pt.reference_bits) + "," + fmt12(pt.gap) + "\n";
            detail_cli::emit(g, out, text);
            return 0;
        }

        err << "error: no subcommand\n";
        return 2;
    } catch (const resource_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const validation_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace oneshot::cli
