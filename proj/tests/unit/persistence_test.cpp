#include "strata/engine.hpp"
#include "strata/error.hpp"
#include "strata/persistence.hpp"
#include "strata/provider.hpp"
#include "strata/serialization.hpp"
#include "support/state_gen.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace strata;
using strata::testing::read_bytes;
using strata::testing::TempDir;

namespace {

Config small_config() {
    Config c;
    c.stm_capacity = 3;
    c.mtm_segment_capacity = 5;
    c.theta = 0.4;
    return c;
}

} // namespace

TEST(Persistence, EmptyMemoryRoundTrip) {
    TempDir dir;
    const MemoryState empty = MemoryState::empty("alice", Config{});
    const auto file = save({kSnapshotVersion, empty, 0}, dir.path());
    EXPECT_EQ(file, snapshot_path(dir.path(), "alice"));
    EXPECT_EQ(load(file).state, empty);
}

TEST(Persistence, RandomStatesRoundTripAndEncodeCanonically) {
    std::mt19937 rng(4242);
    StubProvider stub;
    const Engine engine(small_config(), stub);
    TempDir dir;
    for (int i = 0; i < 20; ++i) {
        const MemoryState state = gen::memory(rng, engine, "u" + std::to_string(i), gen::uniform_int(rng, 0, 40));
        const MemorySnapshot snap{kSnapshotVersion, state, state.clock};
        const auto file = save(snap, dir.path());
        const std::string first = read_bytes(file);
        EXPECT_EQ(load(file), snap);
        save(snap, dir.path());
        EXPECT_EQ(read_bytes(file), first);
        EXPECT_EQ(encode_snapshot(decode_snapshot(first)), first);
    }
}

TEST(Persistence, UnwritableLocationIsIoErrorAndLeavesNoFile) {
    TempDir dir;
    const auto blocker = dir.path() / "not-a-dir";
    std::ofstream(blocker) << "x";
    try {
        save({kSnapshotVersion, MemoryState::empty("bob", Config{}), 0}, blocker);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::io);
    }
    EXPECT_FALSE(std::filesystem::exists(blocker / "bob"));
}

TEST(Persistence, TruncatedFileIsParseError) {
    StubProvider stub;
    const Engine engine(small_config(), stub);
    std::mt19937 rng(1);
    const std::string bytes = encode_snapshot({kSnapshotVersion, gen::memory(rng, engine, "t", 10), 0});
    try {
        decode_snapshot(bytes.substr(0, bytes.size() / 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse);
        EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
    }
}

TEST(Persistence, UnknownVersionIsVersionError) {
    std::string bytes = encode_snapshot({kSnapshotVersion, MemoryState::empty("v", Config{}), 0});
    bytes.replace(bytes.find("\"version\":1"), 11, "\"version\":999");
    try {
        decode_snapshot(bytes);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::version);
    }
}

TEST(Persistence, StructuralErrorsCarryJsonPath) {
    StubProvider stub;
    const Engine engine(small_config(), stub);
    std::mt19937 rng(2);
    MemoryState state = engine.new_memory("p");
    engine.ingest(state, "hello world", "hi", 1);
    Json doc = Json::parse(encode_snapshot({kSnapshotVersion, state, 1}));
    doc["stm"]["pages"][0]["query"] = 5;
    try {
        decode_snapshot(doc.dump());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse);
        EXPECT_NE(std::string(e.what()).find("$.stm.pages[0].query"), std::string::npos) << e.what();
    }
}

TEST(Persistence, InvariantBreachIsCorruption) {
    StubProvider stub;
    const Engine engine(small_config(), stub);
    MemoryState state = engine.new_memory("c");
    engine.ingest(state, "hello world", "hi", 1);
    Json doc = Json::parse(encode_snapshot({kSnapshotVersion, state, 1}));
    doc["next_id"] = 1;  // below ids already handed out
    try {
        decode_snapshot(doc.dump());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::corruption);
    }
}

TEST(Persistence, MissingSnapshotIsNotFound) {
    TempDir dir;
    try {
        load(snapshot_path(dir.path(), "ghost"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_found);
    }
}

TEST(Archive, AppendsOneLinePerSegmentAndReparses) {
    std::mt19937 rng(3);
    StubProvider stub;
    IdSequence ids;
    TempDir dir;
    const Segment a = gen::segment(rng, ids, stub, 2, 0, 10);
    const Segment b = gen::segment(rng, ids, stub, 3, 0, 10);
    archive_segment(a, "arch", dir.path());
    const auto file = archive_segment(b, "arch", dir.path());
    const std::string bytes = read_bytes(file);
    EXPECT_EQ(std::count(bytes.begin(), bytes.end(), '\n'), 2);
    const auto segments = read_archive(file);
    ASSERT_EQ(segments.size(), 2u);
    EXPECT_EQ(segments[0], a);
    EXPECT_EQ(segments[1], b);
}

TEST(Archive, EmptySegmentRejected) {
    TempDir dir;
    Segment empty;
    empty.id = SegmentId{1};
    EXPECT_THROW(archive_segment(empty, "arch", dir.path()), Error);
    EXPECT_FALSE(std::filesystem::exists(archive_path(dir.path(), "arch")));
}

TEST(UserIds, PathSafety) {
    EXPECT_TRUE(is_valid_user_id("alice"));
    EXPECT_TRUE(is_valid_user_id("a.b-c_1"));
    EXPECT_FALSE(is_valid_user_id(""));
    EXPECT_FALSE(is_valid_user_id("."));
    EXPECT_FALSE(is_valid_user_id(".."));
    EXPECT_FALSE(is_valid_user_id("a/b"));
    EXPECT_FALSE(is_valid_user_id("a b"));
    EXPECT_FALSE(is_valid_user_id(std::string(129, 'a')));
}

TEST(Persistence, WipeRemovesUser) {
    TempDir dir;
    save({kSnapshotVersion, MemoryState::empty("w", Config{}), 0}, dir.path());
    EXPECT_TRUE(wipe_user(dir.path(), "w"));
    EXPECT_FALSE(std::filesystem::exists(user_directory(dir.path(), "w")));
    EXPECT_FALSE(wipe_user(dir.path(), "w"));
}
