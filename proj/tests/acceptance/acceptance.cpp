// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. All tolerances and seeds are fixed below.

#include "strata/engine.hpp"
#include "strata/error.hpp"
#include "strata/http_server.hpp"
#include "strata/lpm.hpp"
#include "strata/memory_state.hpp"
#include "strata/metrics.hpp"
#include "strata/mtm.hpp"
#include "strata/persistence.hpp"
#include "strata/provider.hpp"
#include "strata/replay.hpp"
#include "strata/retrieval.hpp"
#include "strata/service.hpp"
#include "strata/stm.hpp"
#include "strata/transcript.hpp"
#include "support/fault_provider.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/state_gen.hpp"
#include "support/temp_dir.hpp"

#include <httplib.h>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

using namespace strata;
using strata::testing::read_bytes;
using strata::testing::TempDir;

namespace {

constexpr double kHeatExpected = 5.3678794412;
constexpr double kHeatTolerance = 1e-9;
constexpr double kFScoreTolerance = 1e-12;
constexpr double kBleuExpected = 0.36788;
constexpr double kBleuTolerance = 1e-5;
constexpr double kPromotionHeatTolerance = 1e-12;
constexpr double kReplayBudgetSeconds = 5.0;

// Frozen stub-provider accounting for the bundled fixture at default config.
constexpr double kCallsPerRespond = 10.75;
constexpr double kRecalledTokensPerAnswer = 274.375;

constexpr std::uint32_t kSeed = 20240601;

const std::filesystem::path kFixture = std::filesystem::path(STRATA_FIXTURE_DIR) / "conversation_40.jsonl";

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

Config config_with(std::size_t stm_capacity, std::size_t mtm_capacity) {
    Config c;
    c.stm_capacity = stm_capacity;
    c.mtm_segment_capacity = mtm_capacity;
    return c;
}

// ---------------------------------------------------------------------------

Outcome heat_formula() {
    Outcome out;
    Segment s;
    s.n_visit = 2;
    s.l_interaction = 3;
    s.last_access = 0;
    const double h = heat(s, 10'000'000, HeatWeights{});
    if (std::abs(h - kHeatExpected) > kHeatTolerance) out.fail(fmt::format("heat(2,3,1e7)={:.12f}", h));

    Segment zero;
    zero.last_access = 42;
    const double h0 = heat(zero, 42, HeatWeights{});
    if (h0 != 1.0) out.fail(fmt::format("heat at dt=0 with zero counters = {:.17g}", h0));
    if (out.pass) out.detail = fmt::format("heat(2,3,1e7)={:.10f}, heat(0,0,0)={}", h, h0);
    return out;
}

Outcome f_score_oracle() {
    Outcome out;
    std::mt19937 rng(kSeed + 1);
    StubProvider stub;
    IdSequence ids;
    double max_diff = 0.0;
    double lo = 3.0;
    double hi = -3.0;
    for (int i = 0; i < 20; ++i) {
        const DialoguePage p = gen::page(rng, ids, stub, 100);
        const Segment s = gen::segment(rng, ids, stub, 1 + static_cast<std::size_t>(i % 3), 0, 100);
        const double got = f_score(p, s);
        const double want = oracle::f_score(p, s);
        max_diff = std::max(max_diff, std::abs(got - want));
        lo = std::min(lo, got);
        hi = std::max(hi, got);
        if (std::abs(got - want) > kFScoreTolerance) out.fail(fmt::format("pair {}: {} vs oracle {}", i, got, want));
        if (got < -1.0 || got > 2.0) out.fail(fmt::format("pair {}: {} outside [-1, 2]", i, got));
    }
    if (out.pass) out.detail = fmt::format("20 pairs, max |diff|={:.3g}, range [{:.4f}, {:.4f}]", max_diff, lo, hi);
    return out;
}

Outcome stm_fifo() {
    Outcome out;
    std::mt19937 rng(kSeed + 2);
    StubProvider stub;
    constexpr int kTrials = 300;
    for (int trial = 0; trial < kTrials && out.pass; ++trial) {
        const auto capacity = static_cast<std::size_t>(gen::uniform_int(rng, 1, 10));
        const int n = gen::uniform_int(rng, 0, 100);
        ShortTermMemory stm(capacity);
        IdSequence ids;
        std::vector<PageId> appended;
        std::vector<PageId> overflowed;
        for (int i = 0; i < n; ++i) {
            DialoguePage p = new_page(ids, gen::sentence(rng), gen::sentence(rng, 0, 5), i);
            appended.push_back(p.id);
            auto r = stm.append(std::move(p), stub, ids);
            if (r.overflow) overflowed.push_back(r.overflow->id);
            if (stm.size() > capacity) out.fail(fmt::format("trial {}: size {} > capacity {}", trial, stm.size(), capacity));
        }
        const std::size_t expected = static_cast<std::size_t>(n) > capacity ? n - capacity : 0;
        if (overflowed.size() != expected ||
            !std::equal(overflowed.begin(), overflowed.end(), appended.begin())) {
            out.fail(fmt::format("trial {}: overflow is not the first n-capacity pages (n={}, cap={})", trial, n,
                                 capacity));
        }
    }
    if (out.pass) out.detail = fmt::format("{} random sequences", kTrials);
    return out;
}

Outcome mtm_eviction() {
    Outcome out;
    std::mt19937 rng(kSeed + 3);
    StubProvider stub;
    const HeatWeights w;
    constexpr Timestamp kNow = 30'000'000;
    const Timestamp access_points[] = {0, 10'000'000, 20'000'000, kNow};
    int tie_cases = 0;
    int new_segment_evicted = 0;

    for (int trial = 0; trial < 200 && out.pass; ++trial) {
        IdSequence ids;
        const int n = gen::uniform_int(rng, 1, 20);
        std::vector<Segment> segments;
        for (int i = 0; i < n; ++i) {
            Segment s = gen::segment(rng, ids, stub, static_cast<std::size_t>(gen::uniform_int(rng, 1, 3)), 0, kNow);
            s.n_visit = static_cast<std::uint64_t>(gen::uniform_int(rng, 0, 3));
            s.l_interaction = static_cast<std::uint64_t>(gen::uniform_int(rng, 0, static_cast<int>(s.pages.size())));
            s.last_access = access_points[gen::uniform_int(rng, 0, 3)];
            segments.push_back(std::move(s));
        }
        // Every third state clones one segment's heat inputs onto others so
        // the tie-breaks are exercised.
        if (trial % 3 == 0 && n > 1) {
            const Segment& src = segments[static_cast<std::size_t>(gen::uniform_int(rng, 0, n - 1))];
            for (auto& s : segments) {
                if (gen::uniform_int(rng, 0, 1) == 0) continue;
                s.n_visit = src.n_visit;
                s.l_interaction = std::min<std::uint64_t>(src.l_interaction, s.pages.size());
                s.last_access = src.last_access;
            }
        }
        MidTermMemory mtm = MidTermMemory::restore(static_cast<std::size_t>(n), segments);

        // theta at the f_score ceiling forces a new segment, pushing the store
        // one over capacity.
        DialoguePage page = new_page(ids, gen::sentence(rng), gen::sentence(rng, 0, 4), kNow);
        const auto result = mtm.insert_page(std::move(page), 2.0, w, stub, ids, kNow);
        if (!result.created || !result.evicted) {
            out.fail(fmt::format("trial {}: insert did not create and evict", trial));
            break;
        }
        std::vector<Segment> before;
        for (const auto& [id, s] : mtm.segments()) before.push_back(s);
        before.push_back(*result.evicted);

        const SegmentId want = oracle::coldest(before, kNow, w);
        if (result.evicted->id != want) {
            out.fail(fmt::format("trial {}: evicted {} but brute force says {}", trial, result.evicted->id.value,
                                 want.value));
        }
        const double eh = oracle::heat(*result.evicted, kNow, w);
        int equal_heat = 0;
        for (const auto& s : before) {
            const double h = oracle::heat(s, kNow, w);
            if (h < eh) out.fail(fmt::format("trial {}: survivor {} is colder", trial, s.id.value));
            if (h == eh) ++equal_heat;
        }
        if (equal_heat > 1) ++tie_cases;
        if (result.evicted->id == result.segment_id) ++new_segment_evicted;
    }
    if (out.pass && tie_cases == 0) out.fail("no tied minimum was generated");
    if (out.pass) {
        out.detail = fmt::format("200 states, {} with tied minimum heat, {} evicted the new segment", tie_cases,
                                 new_segment_evicted);
    }
    return out;
}

Outcome promotion() {
    Outcome out;
    constexpr Timestamp kT = 1'000'000;
    StubProvider stub;
    Config config = config_with(1, 200);
    Engine engine(config, stub);

    auto build = [&] {
        MemoryState state = engine.new_memory("promo");
        Segment s;
        s.id = state.ids.next<SegmentId>();
        for (int i = 0; i < 4; ++i) {
            DialoguePage p = new_page(state.ids, "hiking trail mountain river", "mountain trail hiking", kT);
            p.chain_id = state.ids.next<ChainId>();
            p.chain_meta = p.query;
            p.keywords = stub.extract_keywords(page_text(p));
            p.embedding = stub.embed(page_text(p));
            s.pages.push_back(std::move(p));
        }
        s.summary = "hiking trail mountain river";
        s.keywords = stub.extract_keywords(s.summary);
        s.embedding = stub.embed(s.summary);
        s.n_visit = 0;
        s.l_interaction = 4;
        s.last_access = kT;
        state.mtm = MidTermMemory::restore(config.mtm_segment_capacity, {s});
        state.clock = kT;
        return std::pair{state, s.id};
    };

    auto [state, sid] = build();
    // heat = 0 + 4 + 1 = 5: at tau, not above it.
    if (!state.mtm.hot_segments(config.heat_tau, config.heat, kT).empty()) out.fail("segment hot before crossing");

    std::size_t promotions = 0;
    auto r1 = engine.ingest(state, "hiking trail mountain", "river hiking trail", kT);
    promotions += r1.promoted.size();
    if (!r1.promoted.empty()) out.fail("promotion before the segment crossed tau");

    // Pre-reset view of the same step: identical engine with tau out of reach.
    Config no_promo = config;
    no_promo.heat_tau = 1e9;
    Engine shadow(no_promo, stub);
    MemoryState shadow_state = state;
    shadow.ingest(shadow_state, "mountain hiking trail", "trail river", kT);

    const std::size_t kb_before = state.persona.user_kb.size();
    auto r2 = engine.ingest(state, "mountain hiking trail", "trail river", kT);
    promotions += r2.promoted.size();
    if (r2.promoted.size() != 1 || r2.promoted.front() != sid) {
        out.fail(fmt::format("crossing produced {} promotions", r2.promoted.size()));
        return out;
    }
    const Segment& pre = shadow_state.mtm.at(sid);
    const Segment& post = state.mtm.at(sid);
    if (pre.l_interaction != 5) out.fail(fmt::format("joined segment has l_interaction {}", pre.l_interaction));
    if (post.l_interaction != 0) out.fail(fmt::format("l_interaction after promotion = {}", post.l_interaction));
    const double drop = heat(pre, kT, config.heat) - heat(post, kT, config.heat);
    const double want_drop = config.heat.beta * static_cast<double>(pre.l_interaction);
    if (std::abs(drop - want_drop) > kPromotionHeatTolerance) {
        out.fail(fmt::format("heat dropped by {} instead of {}", drop, want_drop));
    }
    if (state.persona.user_kb.size() <= kb_before) out.fail("promotion added no user facts");

    auto r3 = engine.ingest(state, "hiking mountain trail", "river", kT);
    promotions += r3.promoted.size();
    if (promotions != 1) out.fail(fmt::format("{} promotions in total, expected 1", promotions));

    // Queue bounds under many promotions.
    std::mt19937 rng(kSeed + 5);
    PersonaStore persona;
    IdSequence ids;
    std::size_t max_kb = 0;
    std::size_t max_agent = 0;
    for (int i = 0; i < 1000; ++i) {
        const Segment seg =
            gen::segment(rng, ids, stub, static_cast<std::size_t>(gen::uniform_int(rng, 1, 5)), i, i + 10);
        promote(persona, seg, config.trait_schema, stub, i + 10);
        max_kb = std::max(max_kb, persona.user_kb.size());
        max_agent = std::max(max_agent, persona.agent_traits.size());
    }
    if (max_kb > 100 || max_agent > 100) out.fail(fmt::format("queue grew to {}/{}", max_kb, max_agent));
    if (out.pass) {
        out.detail = fmt::format("1 promotion at crossing, heat drop {} = beta*{}, queues peaked at {}/{} over 1000",
                                 drop, pre.l_interaction, max_kb, max_agent);
    }
    return out;
}

Outcome two_stage_retrieval() {
    Outcome out;
    std::mt19937 rng(kSeed + 6);
    StubProvider stub;
    std::size_t compared_pages = 0;
    for (int trial = 0; trial < 100 && out.pass; ++trial) {
        Config config;
        config.top_m_segments = static_cast<std::size_t>(gen::uniform_int(rng, 1, 6));
        config.top_k_pages = static_cast<std::size_t>(gen::uniform_int(rng, 1, 12));
        MemoryState state = MemoryState::empty(fmt::format("r{}", trial), config);
        const int n_segments = gen::uniform_int(rng, 1, 10);
        std::vector<Segment> segments;
        for (int i = 0; i < n_segments; ++i) {
            segments.push_back(gen::segment(rng, state.ids, stub,
                                            static_cast<std::size_t>(gen::uniform_int(rng, 1, 5)), 0, 500));
        }
        // Duplicate a page's text across segments now and then to force score ties.
        if (trial % 4 == 0 && n_segments > 1) {
            DialoguePage copy = segments.front().pages.front();
            copy.id = state.ids.next<PageId>();
            segments.back().pages.push_back(copy);
            if (segments.back().pages.size() > 5) segments.back().pages.erase(segments.back().pages.begin());
        }
        state.mtm = MidTermMemory::restore(config.mtm_segment_capacity, segments);
        state.clock = 1000;

        const std::string query = gen::sentence(rng, 1, 6);
        DialoguePage qp;
        qp.query = query;
        qp.embedding = stub.embed(query);
        qp.keywords = stub.extract_keywords(query);
        const auto want = oracle::two_stage(segments, qp, config.top_m_segments, config.top_k_pages);

        const MidTermMemory before = state.mtm;
        const RetrievalBundle got = retrieve(state, query, config, stub, 1000, true);

        if (got.mtm_pages.size() != want.pages.size()) {
            out.fail(fmt::format("trial {}: {} pages vs oracle {}", trial, got.mtm_pages.size(), want.pages.size()));
            break;
        }
        std::set<SegmentId> contributing;
        for (std::size_t i = 0; i < want.pages.size(); ++i) {
            const auto& g = got.mtm_pages[i];
            const auto& o = want.pages[i];
            if (g.page.id != o.page || g.segment_id != o.segment || g.score != o.score) {
                out.fail(fmt::format("trial {} rank {}: page {} seg {} score {} vs oracle page {} seg {} score {}",
                                     trial, i, g.page.id.value, g.segment_id.value, g.score, o.page.value,
                                     o.segment.value, o.score));
                break;
            }
            contributing.insert(o.segment);
        }
        compared_pages += want.pages.size();
        for (const auto& [id, seg] : state.mtm.segments()) {
            const std::uint64_t expected = before.at(id).n_visit + (contributing.count(id) ? 1 : 0);
            if (seg.n_visit != expected) {
                out.fail(fmt::format("trial {}: segment {} n_visit {} expected {}", trial, id.value, seg.n_visit,
                                     expected));
            }
        }
    }
    if (out.pass) out.detail = fmt::format("100 memories, {} ranked pages matched in order", compared_pages);
    return out;
}

Outcome metrics_check() {
    Outcome out;
    const double b = metrics::bleu1("the cat sat", "the cat sat on the mat");
    const double f = metrics::f1("a b", "b c");
    if (std::abs(b - kBleuExpected) > kBleuTolerance) out.fail(fmt::format("bleu1={:.8f}", b));
    if (f != 0.5) out.fail(fmt::format("f1={:.17g}", f));
    for (const char* s : {"the cat sat", "a", "Hello, world!"}) {
        if (metrics::f1(s, s) != 1.0 || metrics::bleu1(s, s) != 1.0) out.fail(fmt::format("identity fails on '{}'", s));
    }
    if (out.pass) out.detail = fmt::format("bleu1={:.6f}, f1={}", b, f);
    return out;
}

struct ReplayRun {
    std::string snapshot_bytes;
    std::string answers;
    std::string report;
    double seconds = 0.0;
};

ReplayRun run_replay(const Transcript& transcript, const std::filesystem::path& dir) {
    const auto start = std::chrono::steady_clock::now();
    StubProvider stub;
    Engine engine(Config{}, stub);
    ReplayResult result = replay(transcript, engine, "fixture");
    const auto file = save(MemorySnapshot{kSnapshotVersion, result.state, result.state.clock}, dir);
    ReplayRun run;
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.snapshot_bytes = read_bytes(file);
    const Json report = report_to_json(result.report);
    run.answers = report.at("answers").dump();
    run.report = report.dump();
    return run;
}

Outcome determinism() {
    Outcome out;
    const Transcript transcript = load_transcript(kFixture);
    TempDir a;
    TempDir b;
    const ReplayRun first = run_replay(transcript, a.path());
    const ReplayRun second = run_replay(transcript, b.path());
    if (first.snapshot_bytes.empty()) out.fail("empty snapshot");
    if (first.snapshot_bytes != second.snapshot_bytes) out.fail("snapshots differ");
    if (first.answers != second.answers) out.fail("answer sets differ");
    if (first.report != second.report) out.fail("reports differ");
    const double worst = std::max(first.seconds, second.seconds);
    if (worst >= kReplayBudgetSeconds) out.fail(fmt::format("replay took {:.2f}s", worst));
    if (out.pass) {
        out.detail = fmt::format("{} exchanges, snapshot {} bytes, slowest run {:.3f}s", transcript.exchanges.size(),
                                 first.snapshot_bytes.size(), worst);
    }
    return out;
}

Outcome persistence() {
    Outcome out;
    std::mt19937 rng(kSeed + 9);
    StubProvider stub;
    Engine engine(Config{}, stub);
    TempDir dir;
    for (int i = 0; i < 50 && out.pass; ++i) {
        const MemoryState state = gen::memory(rng, engine, fmt::format("user{}", i), gen::uniform_int(rng, 0, 60));
        const MemorySnapshot snap{kSnapshotVersion, state, state.clock};
        const auto file = save(snap, dir.path());
        const std::string first = read_bytes(file);
        if (!(load(file) == snap)) out.fail(fmt::format("state {} changed across save/load", i));
        save(snap, dir.path());
        if (read_bytes(file) != first) out.fail(fmt::format("state {} saved to different bytes", i));
    }

    // Kill a child mid-save and check the file is still a whole snapshot.
    TempDir kill_dir;
    const MemoryState old_state = gen::memory(rng, engine, "victim", 40);
    MemoryState new_state = gen::memory(rng, engine, "victim", 400);
    const MemorySnapshot old_snap{kSnapshotVersion, old_state, old_state.clock};
    const MemorySnapshot new_snap{kSnapshotVersion, new_state, new_state.clock};
    const auto file = save(old_snap, kill_dir.path());
    int saw_old = 0;
    int saw_new = 0;
    constexpr int kKills = 25;
    for (int k = 0; k < kKills && out.pass; ++k) {
        std::fflush(nullptr);
        const pid_t pid = ::fork();
        if (pid < 0) {
            out.fail("fork failed");
            break;
        }
        if (pid == 0) {
            for (;;) {
                save(new_snap, kill_dir.path());
                save(old_snap, kill_dir.path());
            }
        }
        ::usleep(static_cast<useconds_t>(gen::uniform_int(rng, 0, 20'000)));
        ::kill(pid, SIGKILL);
        int status = 0;
        ::waitpid(pid, &status, 0);
        try {
            const MemorySnapshot loaded = load(file);
            if (loaded == old_snap) {
                ++saw_old;
            } else if (loaded == new_snap) {
                ++saw_new;
            } else {
                out.fail(fmt::format("kill {}: loaded a snapshot that was never written", k));
            }
        } catch (const std::exception& e) {
            out.fail(fmt::format("kill {}: snapshot not loadable: {}", k, e.what()));
        }
    }
    if (out.pass) {
        out.detail = fmt::format("50 round-trips byte-stable, {} kills mid-save (old {}, new {})", kKills, saw_old,
                                 saw_new);
    }
    return out;
}

Outcome service_atomicity() {
    Outcome out;
    std::mt19937 rng(kSeed + 10);
    TempDir dir;
    StubProvider stub;
    strata::testing::FaultProvider fault(stub, 0.3, kSeed + 11);
    const Config config;
    Engine engine(config, fault);
    std::atomic<Timestamp> clock{1'000'000};
    Service service(engine, ServiceOptions{dir.path(), std::nullopt, true, [&] { return clock.fetch_add(60); }});
    HttpServer server(service);
    server.bind("127.0.0.1", 0);
    server.start();

    httplib::Client client("127.0.0.1", server.port());
    client.set_read_timeout(30, 0);
    const std::vector<std::string> users = {"ana", "ben", "cho", "dev"};
    int ok = 0;
    int unavailable = 0;
    for (int i = 0; i < 500 && out.pass; ++i) {
        const std::string& user = users[static_cast<std::size_t>(gen::uniform_int(rng, 0, 3))];
        const auto file = snapshot_path(dir.path(), user);
        const std::string before_bytes = read_bytes(file);
        const auto before_state = service.registry().read(user);

        const Json body = {{"query", gen::sentence(rng, 1, 8)}};
        const auto res = client.Post("/v1/users/" + user + "/respond", body.dump(), "application/json");
        if (!res) {
            out.fail(fmt::format("request {}: transport error {}", i, httplib::to_string(res.error())));
            break;
        }
        const auto after_state = service.registry().read(user);
        if (res->status == 200) {
            ++ok;
            const MemorySnapshot disk = decode_snapshot(read_bytes(file), file.string());
            if (!(disk.state == *after_state)) out.fail(fmt::format("request {}: disk and memory disagree", i));
        } else if (res->status == 503) {
            ++unavailable;
            if (read_bytes(file) != before_bytes) out.fail(fmt::format("request {}: 503 changed the snapshot", i));
            if (!(*after_state == *before_state)) out.fail(fmt::format("request {}: 503 changed live state", i));
        } else {
            out.fail(fmt::format("request {}: status {} body {}", i, res->status, res->body));
        }
        const auto broken = invariant_violations(*after_state, &config);
        if (!broken.empty()) out.fail(fmt::format("request {}: {}", i, broken.front()));
    }
    server.stop();
    for (const auto& user : users) {
        const auto file = snapshot_path(dir.path(), user);
        if (!std::filesystem::exists(file)) continue;
        try {
            decode_snapshot(read_bytes(file), file.string());
        } catch (const std::exception& e) {
            out.fail(fmt::format("final snapshot of {} invalid: {}", user, e.what()));
        }
    }
    if (out.pass && (ok == 0 || unavailable == 0)) out.fail(fmt::format("degenerate mix: {} ok, {} 503", ok, unavailable));
    if (out.pass) {
        out.detail = fmt::format("500 requests: {} ok, {} 503, {} injected faults", ok, unavailable,
                                 fault.injected_failures());
    }
    return out;
}

Outcome efficiency() {
    Outcome out;
    const Transcript transcript = load_transcript(kFixture);
    StubProvider stub;
    Engine engine(Config{}, stub);
    const ReplayReport report = replay(transcript, engine, "fixture").report;

    std::size_t calls = 0;
    std::size_t tokens = 0;
    std::string per_answer;
    for (const auto& a : report.answers) {
        calls += a.provider_calls;
        tokens += a.recalled_tokens;
        per_answer += (per_answer.empty() ? "" : ",") + std::to_string(a.recalled_tokens);
    }
    const double n = static_cast<double>(report.answers.size());
    if (report.answers.empty()) out.fail("no answers");
    if (calls != report.answer_usage.calls) out.fail("per-answer calls do not sum to the answer usage");
    if (report.avg_calls_per_respond != static_cast<double>(calls) / n) out.fail("average calls inconsistent");
    if (report.avg_recalled_tokens != static_cast<double>(tokens) / n) out.fail("average recalled tokens inconsistent");
    if (report.total_usage.calls != report.ingest_usage.calls + report.answer_usage.calls) {
        out.fail("total calls != ingest + answer");
    }
    if (report.avg_calls_per_respond != kCallsPerRespond) {
        out.fail(fmt::format("calls/respond {} != frozen {}", report.avg_calls_per_respond, kCallsPerRespond));
    }
    if (report.avg_recalled_tokens != kRecalledTokensPerAnswer) {
        out.fail(fmt::format("recalled tokens/answer {} != frozen {}", report.avg_recalled_tokens,
                             kRecalledTokensPerAnswer));
    }
    if (out.pass) {
        out.detail = fmt::format("calls/respond={}, recalled tokens per answer [{}] avg={}, total calls={}",
                                 report.avg_calls_per_respond, per_answer, report.avg_recalled_tokens,
                                 report.total_usage.calls);
    }
    return out;
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"heat_formula", heat_formula},
        {"f_score_oracle", f_score_oracle},
        {"stm_fifo", stm_fifo},
        {"mtm_eviction_minimality", mtm_eviction},
        {"promotion_semantics", promotion},
        {"two_stage_retrieval", two_stage_retrieval},
        {"metrics", metrics_check},
        {"replay_determinism", determinism},
        {"persistence", persistence},
        {"service_atomicity", service_atomicity},
        {"efficiency_counters", efficiency},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failures;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
