#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "hypercf/data.hpp"
#include "hypercf/error.hpp"
#include "hypercf/random.hpp"

using namespace hypercf;
namespace fs = std::filesystem;

namespace {

std::string tsv_row(const std::string& u, const std::string& i, std::int64_t ts) {
    return u + "\t" + i + "\t1\t" + std::to_string(ts) + "\n";
}

/// Random log with repeated rows and users of varying activity.
std::vector<Interaction> random_log(Rng& rng, std::size_t users, std::size_t items, std::size_t rows) {
    std::vector<Interaction> log;
    for (std::size_t n = 0; n < rows; ++n) {
        const auto u = rng.uniform_index(users);
        // skew so that some users fall below the threshold
        const auto span = 1 + rng.uniform_index(items);
        const auto i = rng.uniform_index(u % 3 == 0 ? std::min<std::uint64_t>(span, 6) : span);
        log.push_back({"u" + std::to_string(u), "i" + std::to_string(i), 1.0,
                       static_cast<std::int64_t>(rng.uniform_index(1000))});
    }
    return log;
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("hypercf_test_data_" + name); }

}  // namespace

TEST_CASE("parse_interactions") {
    SUBCASE("well-formed rows") {
        const auto rows = parse_interactions("1\t10\t5\t100\n2\t20\t3\t200\n3\t30\t4\t300\n", {});
        REQUIRE(rows.size() == 3);
        CHECK(rows[1].user == "2");
        CHECK(rows[1].item == "20");
        CHECK(rows[1].rating == 3.0);
        CHECK(rows[2].timestamp == 300);
    }
    SUBCASE("missing timestamp is malformed") {
        std::string text;
        for (int n = 0; n < 150; ++n) text += tsv_row("u" + std::to_string(n), "i", n);
        text += "9\t99\t1\n";
        LoadReport report;
        const auto rows = parse_interactions(text, {}, &report);
        CHECK(rows.size() == 150);
        CHECK(report.malformed == 1);
        CHECK(report.malformed_lines == std::vector<std::size_t>{151});
    }
    SUBCASE("too many malformed rows aborts") {
        CHECK_THROWS_AS(parse_interactions("1\t2\t3\t4\n1\t2\n", {}), DataError);
        CHECK_THROWS_AS(parse_interactions("1\t2\t3\tlater\n5\t6\t7\t8\n", {}), DataError);
    }
    SUBCASE("presets") {
        const auto csv = parse_interactions("user,item,rating,ts\na,b,1,5\n", FormatOptions::preset("csv"));
        REQUIRE(csv.size() == 1);
        CHECK(csv[0].item == "b");
        const auto ml1m = parse_interactions("1::2::3::4\n", FormatOptions::preset("ml-1m"));
        CHECK(ml1m[0].timestamp == 4);
        const auto nots = parse_interactions("x\ty\t1\n", FormatOptions::preset("tsv-nots"));
        CHECK_FALSE(nots[0].timestamp.has_value());
        CHECK_THROWS_AS(FormatOptions::preset("parquet"), ConfigError);
    }
    SUBCASE("blank lines are skipped") {
        CHECK(parse_interactions("\n1\t2\t3\t4\n\n", {}).size() == 1);
    }
}

TEST_CASE("load_interactions") {
    SUBCASE("unreadable file") {
        CHECK_THROWS_AS(load_interactions("/nonexistent/ratings.tsv", {}), IoError);
    }
    SUBCASE("MovieLens-100K matches a line count") {
        const fs::path path = HYPERCF_ML100K;
        if (!fs::exists(path)) {
            MESSAGE("MovieLens-100K not found at " << path << "; run tools/fetch_ml100k.sh");
            return;
        }
        std::ifstream in(path, std::ios::binary);
        const auto lines = std::count(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>(), '\n');
        LoadReport report;
        const auto rows = load_interactions(path, FormatOptions::preset("tsv"), &report);
        CHECK(rows.size() == static_cast<std::size_t>(lines));
        CHECK(rows.size() == 100000);
        CHECK(report.malformed == 0);
    }
}

TEST_CASE("build_dataset") {
    SUBCASE("five items is enough, four is not") {
        std::vector<Interaction> log;
        for (int i = 0; i < 5; ++i) log.push_back({"u", "i" + std::to_string(i), 1.0, i});
        const Dataset ds = build_dataset(log);
        CHECK(ds.users() == 1);
        CHECK(ds.items() == 5);
        log.pop_back();
        CHECK_THROWS_AS(build_dataset(log), DataError);
    }
    SUBCASE("empty input") { CHECK_THROWS_AS(build_dataset({}), DataError); }
    SUBCASE("duplicates keep the latest timestamp") {
        std::vector<Interaction> log;
        for (int i = 0; i < 5; ++i) log.push_back({"u", "i" + std::to_string(i), 1.0, 10});
        log.push_back({"u", "i2", 1.0, 99});
        log.push_back({"u", "i2", 1.0, 50});
        const Dataset ds = build_dataset(log);
        CHECK(ds.actions() == 5);
        CHECK(ds.interactions[0][2].timestamp == 99);
    }
    SUBCASE("filtering drops sparse users and orphaned items") {
        // user b drops out and item y goes with it
        std::vector<Interaction> log;
        for (const char* i : {"p", "q", "r", "s", "z"}) log.push_back({"a", i, 1.0, 1});
        for (const char* i : {"z", "y"}) log.push_back({"b", i, 1.0, 1});
        for (const char* i : {"p", "q", "r", "s", "t"}) log.push_back({"c", i, 1.0, 1});
        log.push_back({"a", "z", 1.0, 2});
        const Dataset ds = build_dataset(log);
        CHECK(ds.user_ids == std::vector<std::string>{"a", "c"});
        CHECK(ds.item_ids == std::vector<std::string>{"p", "q", "r", "s", "z", "t"});
        std::vector<Interaction> chain;
        for (const char* i : {"p", "q", "r", "s"}) chain.push_back({"a", i, 1.0, 1});
        chain.push_back({"b", "p", 1.0, 1});
        CHECK_THROWS_AS(build_dataset(chain), DataError);
    }
    SUBCASE("random logs against set-based oracles") {
        Rng rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            const auto log = random_log(rng, 40, 30, 600);
            const Dataset ds = build_dataset(log);

            std::map<std::string, std::set<std::string>> distinct;
            for (const auto& r : log) distinct[r.user].insert(r.item);

            std::set<std::string> users(ds.user_ids.begin(), ds.user_ids.end());
            std::set<std::string> items(ds.item_ids.begin(), ds.item_ids.end());
            CHECK(users.size() == ds.users());
            CHECK(items.size() == ds.items());
            REQUIRE(ds.interactions.size() == ds.users());

            std::vector<std::size_t> item_degree(ds.items(), 0);
            for (std::size_t u = 0; u < ds.users(); ++u) {
                const auto& list = ds.interactions[u];
                CHECK(list.size() >= kMinUserInteractions);
                CHECK(std::is_sorted(list.begin(), list.end(),
                                     [](const auto& a, const auto& b) { return a.item < b.item; }));
                std::set<std::string> kept;
                for (const auto& e : list) {
                    REQUIRE(e.item < ds.items());
                    kept.insert(ds.item_ids[e.item]);
                    ++item_degree[e.item];
                }
                CHECK(kept.size() == list.size());
                std::set<std::string> expected;
                for (const auto& i : distinct[ds.user_ids[u]])
                    if (items.count(i)) expected.insert(i);
                CHECK(kept == expected);
            }
            for (const auto d : item_degree) CHECK(d >= 1);
            CHECK(ds.density() ==
                  doctest::Approx(static_cast<double>(ds.actions()) / (ds.users() * ds.items())).epsilon(1e-12));
        }
    }
    SUBCASE("ids follow first-seen order") {
        std::vector<Interaction> log;
        for (const char* u : {"z", "y"})
            for (const char* i : {"5", "3", "9", "1", "7"}) log.push_back({u, i, 1.0, std::nullopt});
        const Dataset ds = build_dataset(log);
        CHECK(ds.user_ids == std::vector<std::string>{"z", "y"});
        CHECK(ds.item_ids == std::vector<std::string>{"5", "3", "9", "1", "7"});
        CHECK_FALSE(ds.has_timestamps);
    }
}

TEST_CASE("leave_one_out") {
    SUBCASE("latest interaction is held out") {
        std::vector<Interaction> log;
        const std::int64_t ts[] = {10, 20, 30, 5, 1};
        const char* names[] = {"a", "b", "c", "d", "e"};
        for (int n = 0; n < 5; ++n) log.push_back({"u", names[n], 1.0, ts[n]});
        const Dataset ds = build_dataset(log);
        const Split split = leave_one_out(ds, 0);
        CHECK(ds.item_ids[split.test_item[0]] == "c");
        CHECK(split.train[0].size() == 4);
    }
    SUBCASE("timestamp ties go to the larger item index") {
        std::vector<Interaction> log;
        for (int n = 0; n < 5; ++n) log.push_back({"u", std::to_string(n), 1.0, n < 2 ? 9 : 1});
        const Split split = leave_one_out(build_dataset(log), 0);
        CHECK(split.test_item[0] == 1);
    }
    Rng rng(12);
    const Dataset ds = build_dataset(random_log(rng, 60, 300, 3000));
    SUBCASE("partition and latest rule on a random log") {
        const Split split = leave_one_out(ds, 3);
        for (std::size_t u = 0; u < ds.users(); ++u) {
            const auto& list = ds.interactions[u];
            CHECK(split.train[u].size() == list.size() - 1);
            std::set<std::uint32_t> all;
            for (const auto& e : list) all.insert(e.item);
            std::set<std::uint32_t> joined(split.train[u].begin(), split.train[u].end());
            CHECK_FALSE(joined.count(split.test_item[u]));
            joined.insert(split.test_item[u]);
            CHECK(joined == all);
            std::int64_t latest = 0;
            for (const auto& e : list) latest = std::max(latest, *e.timestamp);
            const auto held = std::find_if(list.begin(), list.end(),
                                           [&](const auto& e) { return e.item == split.test_item[u]; });
            CHECK(*held->timestamp == latest);
        }
        CHECK(split.train_size() == ds.actions() - ds.users());
    }
    SUBCASE("without timestamps the pick is seeded") {
        Dataset plain = ds;
        plain.has_timestamps = false;
        for (auto& list : plain.interactions)
            for (auto& e : list) e.timestamp.reset();
        CHECK(leave_one_out(plain, 7) == leave_one_out(plain, 7));
        CHECK_FALSE(leave_one_out(plain, 7) == leave_one_out(plain, 8));
    }
}

TEST_CASE("sample_eval_negatives") {
    Rng rng(13);
    const Dataset ds = build_dataset(random_log(rng, 50, 400, 3000));
    Split split = leave_one_out(ds, 1);
    sample_eval_negatives(ds, split, 5);
    REQUIRE(split.eval_negatives.size() == ds.users());
    for (std::size_t u = 0; u < ds.users(); ++u) {
        const auto& neg = split.eval_negatives[u];
        CHECK(neg.size() == kEvalNegatives);
        std::set<std::uint32_t> candidates(neg.begin(), neg.end());
        candidates.insert(split.test_item[u]);
        CHECK(candidates.size() == kEvalNegatives + 1);
        for (const auto& e : ds.interactions[u]) CHECK(std::count(neg.begin(), neg.end(), e.item) == 0);
        for (const auto i : neg) CHECK(i < ds.items());
    }
    Split again = leave_one_out(ds, 1);
    sample_eval_negatives(ds, again, 5);
    CHECK(again == split);

    SUBCASE("too few eligible items names the user") {
        std::vector<Interaction> small;
        for (int i = 0; i < 100; ++i) small.push_back({"lonely", std::to_string(i), 1.0, i});
        const Dataset tiny = build_dataset(small);
        Split s = leave_one_out(tiny, 0);
        try {
            sample_eval_negatives(tiny, s, 0);
            FAIL("expected an error");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("lonely") != std::string::npos);
        }
    }
}

TEST_CASE("split file") {
    Rng rng(14);
    const Dataset ds = build_dataset(random_log(rng, 60, 600, 1500));
    PreparedSplit prepared{"synthetic", 99, "{\"k\":1}", ds.actions(), leave_one_out(ds, 2)};
    sample_eval_negatives(ds, prepared.split, 3);
    const auto path = temp_path("round_trip.split");
    save_split(path, prepared);
    CHECK(load_split(path) == prepared);

    SUBCASE("byte-identical when written twice") {
        const auto other = temp_path("round_trip2.split");
        save_split(other, prepared);
        std::ifstream a(path, std::ios::binary), b(other, std::ios::binary);
        const std::string sa{std::istreambuf_iterator<char>(a), {}}, sb{std::istreambuf_iterator<char>(b), {}};
        CHECK(sa == sb);
        CHECK(sa.rfind(std::string(kSplitMagic), 0) == 0);
        fs::remove(other);
    }
    SUBCASE("corrupt and truncated files") {
        std::ifstream in(path, std::ios::binary);
        std::string bytes{std::istreambuf_iterator<char>(in), {}};
        const auto bad = temp_path("bad.split");
        {
            std::ofstream out(bad, std::ios::binary);
            out << "NOT-A-SPLIT" << bytes.substr(11);
        }
        CHECK_THROWS_AS(load_split(bad), FormatError);
        {
            std::ofstream out(bad, std::ios::binary);
            out << bytes.substr(0, bytes.size() / 2);
        }
        CHECK_THROWS_AS(load_split(bad), FormatError);
        fs::remove(bad);
        CHECK_THROWS_AS(load_split(temp_path("missing.split")), IoError);
    }
    fs::remove(path);
}
