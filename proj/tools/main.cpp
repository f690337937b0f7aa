// quadper: certify period bounds for K-rational periodic points of z^2 + c
// over Q and quadratic fields, by good-reduction sieving plus an exact orbit
// oracle for residual cases.
//
//   quadper verify --field-disc 0 --height-bound 10000 --max-period 3
//   quadper stats  --stats-table 10
//   quadper oracle --field-disc 33 --c "-71/48" --preperiodic
//
// Exit codes for verify: 0 = verified (no period above the bound),
// 1 = counterexample found, 2 = unresolved diagnostics / incomplete.

#include "CLI11.hpp"
#include "json.hpp"

#include "quadper/driver.hpp"

#include <cinttypes>
#include <cstdio>
#include <iostream>

using namespace quadper;
using nlohmann::json;

namespace {

void print_stats_table(long long D, uint32_t M, int n_max) {
    std::optional<QuadField> field;
    if (D != 0) field = make_field(D);
    auto rows = sieve_stats(field, M, n_max);
    std::printf("%3s %12s %16s %12s\n", "N", "#bad", "types", "proportion");
    for (const auto& r : rows)
        std::printf("%3d %12" PRIu64 " %16" PRIu64 " %12.5g\n", r.N, r.bad_count, r.total_types,
                    r.proportion);
}

int run_verify(const SearchConfig& cfg, int stats_table) {
    if (stats_table > 0) {
        print_stats_table(cfg.D, cfg.M, stats_table);
        return 0;
    }
    RunReport rep = run_verification(cfg);

    std::printf("field D=%lld  B=%lld  M=%u  (sieve %zu primes, refine limit %d)\n", cfg.D, cfg.B,
                rep.config.M, rep.config.initial_primes ? (size_t)rep.config.initial_primes : 0,
                rep.config.refine_limit);
    std::printf("candidates        %" PRIu64 "\n", rep.total_candidates);
    std::printf("filtered          %" PRIu64 "\n", rep.counts[0]);
    std::printf("type-good         %" PRIu64 "\n", rep.counts[1]);
    std::printf("refined-good      %" PRIu64 "\n", rep.counts[2]);
    std::printf("confirmed         %" PRIu64 "\n", rep.counts[3]);
    std::printf("counterexamples   %" PRIu64 "\n", rep.counts[4]);
    if (rep.counts[5]) std::printf("flagged (manual)  %" PRIu64 "\n", rep.counts[5]);
    if (rep.counts[6]) std::printf("oracle failures   %" PRIu64 "\n", rep.counts[6]);
    std::printf("max primes used   %u\n", rep.max_primes_used);
    if (!rep.certified_periods.empty()) {
        std::printf("certified periods:");
        for (uint64_t n : rep.certified_periods) std::printf(" %" PRIu64, n);
        std::printf("\n");
    }
    if (!rep.complete)
        std::printf("incomplete: %" PRIu64 "/%" PRIu64 " blocks done (resume with --checkpoint)\n",
                    rep.blocks_done, rep.blocks_total);
    for (const auto& r : rep.records) {
        if (r.verdict == VerdictKind::Confirmed || r.verdict == VerdictKind::Counterexample ||
            r.verdict == VerdictKind::Flagged || r.verdict == VerdictKind::OracleFailure) {
            std::printf("  %s  c = %s", verdict_name(r.verdict), r.c.c_str());
            if (!r.certified_periods.empty()) {
                std::printf("  periods:");
                for (uint64_t n : r.certified_periods) std::printf(" %" PRIu64, n);
            }
            std::printf("\n");
        }
    }
    return rep.exit_code;
}

int run_oracle(long long D, const std::string& c_str, uint32_t max_period, bool closure) {
    json out;
    if (D == 0) {
        Rational c = parse_rational(c_str);
        auto cert = closure ? preperiodic_closure(c) : find_periodic_points(c, max_period);
        out["c"] = to_string(c);
        out["field"] = 0;
        out["northcott_bound"] = northcott_bound(c);
        json pts = json::array();
        for (const auto& [pt, n] : cert.periodic)
            pts.push_back({{"point", to_string(pt)}, {"period", n}});
        out["periodic"] = pts;
        json cyc = json::array();
        for (const auto& cycle : group_cycles(cert)) {
            json pj = json::array();
            for (const auto& pt : cycle) pj.push_back(to_string(pt));
            cyc.push_back({{"period", cycle.size()}, {"points", pj}});
        }
        out["cycles"] = cyc;
        if (closure) {
            json pp = json::array();
            for (const auto& [pt, tail] : cert.preperiodic)
                pp.push_back({{"point", to_string(pt)}, {"tail", tail}});
            out["preperiodic"] = pp;
            out["affine_preperiodic_count"] = cert.preperiodic.size();
            out["includes_infinity"] = true;
            out["total_with_infinity"] = cert.preperiodic.size() + 1;
        }
    } else {
        QuadField field = make_field(D);
        QuadRational c = parse_quad(c_str, field);
        auto cert = closure ? preperiodic_closure(c) : find_periodic_points(c, max_period);
        out["c"] = to_string(c);
        out["field"] = D;
        out["northcott_bound"] = northcott_bound(c);
        json pts = json::array();
        for (const auto& [pt, n] : cert.periodic)
            pts.push_back({{"point", to_string(pt)}, {"period", n}});
        out["periodic"] = pts;
        json cyc = json::array();
        for (const auto& cycle : group_cycles(cert)) {
            json pj = json::array();
            for (const auto& pt : cycle) pj.push_back(to_string(pt));
            cyc.push_back({{"period", cycle.size()}, {"points", pj}});
        }
        out["cycles"] = cyc;
        if (closure) {
            json pp = json::array();
            for (const auto& [pt, tail] : cert.preperiodic)
                pp.push_back({{"point", to_string(pt)}, {"tail", tail}});
            out["preperiodic"] = pp;
            out["affine_preperiodic_count"] = cert.preperiodic.size();
            out["includes_infinity"] = true;
            out["total_with_infinity"] = cert.preperiodic.size() + 1;
        }
    }
    std::cout << out.dump(2) << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic-point period bound verifier for z^2 + c"};
    app.require_subcommand(1);

    SearchConfig cfg;
    int stats_table = 0;

    auto* verify = app.add_subcommand("verify", "run the bounded-height verification");
    verify->add_option("--field-disc", cfg.D, "fundamental discriminant D, or 0 for Q");
    verify->add_option("--height-bound", cfg.B, "non-logarithmic height bound B");
    verify->add_option("--max-period", cfg.M, "period bound M under test");
    verify->add_option("--initial-primes", cfg.initial_primes,
                       "sieve prime count (0 = default: 5 over Q, 4 over K)");
    verify->add_option("--refine-limit", cfg.refine_limit, "additional primes before the oracle");
    verify->add_option("--threads", cfg.threads, "worker count");
    verify->add_option("--checkpoint", cfg.checkpoint_path, "append-only checkpoint file");
    verify->add_option("--report", cfg.report_path, "JSONL report path");
    verify->add_option("--sieve-cache", cfg.sieve_cache_path, "binary sieve cache path");
    verify->add_flag("--manual", cfg.manual, "list refinement survivors instead of certifying");
    verify->add_option("--max-blocks", cfg.max_blocks, "stop after N blocks (for testing resume)");
    verify->add_option("--stats-table", stats_table, "emit the bad-type table for N = 1..N_max");

    auto* stats = app.add_subcommand("stats", "emit the bad-type table");
    long long stats_D = 0;
    uint32_t stats_M = 3;
    int stats_N = 10;
    stats->add_option("--field-disc", stats_D, "fundamental discriminant D, or 0 for Q");
    stats->add_option("--max-period", stats_M, "period bound M");
    stats->add_option("--stats-table,-N", stats_N, "largest N");

    auto* oracle = app.add_subcommand("oracle", "exact periodic/preperiodic certificate for one c");
    long long oracle_D = 0;
    std::string oracle_c;
    uint32_t oracle_maxp = 16;
    bool oracle_closure = false;
    oracle->add_option("--field-disc", oracle_D, "fundamental discriminant D, or 0 for Q");
    oracle->add_option("--c", oracle_c, "parameter, e.g. \"-29/16\" or \"1/4+1/4*w\"")->required();
    oracle->add_option("--max-period", oracle_maxp, "period reserve hint");
    oracle->add_flag("--preperiodic", oracle_closure, "also compute the full preperiodic closure");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(verify)) return run_verify(cfg, stats_table);
        if (app.got_subcommand(stats)) {
            print_stats_table(stats_D, stats_M, stats_N);
            return 0;
        }
        if (app.got_subcommand(oracle)) return run_oracle(oracle_D, oracle_c, oracle_maxp, oracle_closure);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
