#include "doctest.h"

#include <map>
#include <random>

#include "tsti/oracle.hpp"
#include "tsti/tst.hpp"

using namespace tsti;

namespace {

const char* kRunning = "babababbabab";  // sentinel appended by Text

// Window strings of t, the ground truth for T_q.
std::vector<std::string> windows(const Text& t, std::size_t q) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < t.bytes.size(); ++i)
        out.push_back(t.bytes.substr(i, std::min(q, t.bytes.size() - i)));
    return out;
}

std::vector<std::string> handle_paths(const QTst& x, const std::vector<LeafHandle>& hs) {
    std::vector<std::string> out;
    for (LeafHandle h : hs) out.push_back(x.trie().path(h));
    return out;
}

}  // namespace

TEST_CASE("build collects exactly the q-gram multiset") {
    Text t = Text::from_raw(kRunning);
    QTst x = QTst::build(t, 4);
    auto ms = x.trie().leaf_multiset();
    CHECK(ms == qgram_set(t, 4));
    // the 9-element set of the worked example
    REQUIRE(ms.size() == 9);
    std::vector<std::string> want = {std::string(1, '\0'),
                                     std::string("ab") + '\0',
                                     "abab",
                                     "abba",
                                     std::string("b") + '\0',
                                     std::string("bab") + '\0',
                                     "baba",
                                     "babb",
                                     "bbab"};
    for (std::size_t i = 0; i < 9; ++i) CHECK(ms[i].first == want[i]);
}

TEST_CASE("build on the sentinel alone") {
    Text t;  // "$"
    QTst x = QTst::build(t, 4);
    CHECK(x.trie().leaf_count() == 1);
    CHECK(x.transform(t).size() == 1);
    CHECK(x.trie().path(x.transform(t)[0]) == std::string(1, '\0'));
}

TEST_CASE("transform matches the worked example") {
    Text t = Text::from_raw(kRunning);
    QTst x = QTst::build(t, 4);
    auto tq = x.transform(t);
    REQUIRE(tq.size() == t.size());
    CHECK(handle_paths(x, tq) == windows(t, 4));

    // letter view: leaves named A..I in lexicographic order spell GCGCHDIGCFBEA
    std::map<std::string, char> name;
    char c = 'A';
    for (auto& [s, mult] : x.trie().leaf_multiset()) name[s] = c++;
    std::string letters;
    for (LeafHandle h : tq) letters.push_back(name.at(x.trie().path(h)));
    CHECK(letters == "GCGCHDIGCFBEA");
}

TEST_CASE("transform is the position-to-leaf bijection on random texts") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 40; ++rep) {
        Text t = gen_repetitive(10 + rng() % 40, 1 + rng() % 6, 0.1, rng(), "abc");
        std::size_t q = 2 + rng() % 6;
        QTst x = QTst::build(t, q);
        CHECK(handle_paths(x, x.transform(t)) == windows(t, q));
    }
}

TEST_CASE("transform_pattern") {
    Text t = Text::from_raw(kRunning);
    QTst x = QTst::build(t, 4);

    auto pq = x.transform_pattern(Pattern("babab"));
    REQUIRE(pq.has_value());
    CHECK(handle_paths(x, *pq) == std::vector<std::string>{"baba", "abab"});

    // a pattern containing a novel q-gram has no occurrences
    CHECK(!x.transform_pattern(Pattern("bbbbb")).has_value());
    CHECK(!x.transform_pattern(Pattern("babac")).has_value());
    // q-short patterns are not transformable
    CHECK_THROWS_AS(x.transform_pattern(Pattern("bab")), std::invalid_argument);
}

TEST_CASE("edit plans replace exactly the changed windows") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 120; ++rep) {
        Text t = gen_repetitive(8 + rng() % 30, 1 + rng() % 4, 0.2, rng(), "ab");
        std::size_t q = 2 + rng() % 5;
        QTst x = QTst::build(t, q);
        auto tq_words = handle_paths(x, x.transform(t));

        bool do_insert = rng() % 2 == 0 || t.size() < 4;
        Text t_new = t;
        EditPlan plan;
        if (do_insert) {
            std::size_t i = 1 + rng() % t.size();
            std::string k;
            for (std::size_t j = 0, n = 1 + rng() % 5; j < n; ++j)
                k.push_back("ab"[rng() % 2]);
            t_new = insert_str(t, i, k);
            plan = x.plan_insert(t, i, k);
            CHECK(plan.inserted_qgrams.size() <= k.size() + 2 * q);
            CHECK(plan.removed_qgrams.size() <= 2 * q);
        } else {
            std::size_t i = 1 + rng() % (t.size() - 1);
            std::size_t k = 1 + rng() % std::min<std::size_t>(4, t.size() - i);
            t_new = delete_str(t, i, k);
            plan = x.plan_delete(t, i, k);
            CHECK(plan.removed_qgrams.size() <= k + 2 * q);
            CHECK(plan.inserted_qgrams.size() <= 2 * q);
        }

        // splice the word sequence and compare against the fresh transform
        std::vector<std::string> spliced(tq_words.begin(),
                                         tq_words.begin() + plan.splice.start - 1);
        for (LeafHandle h : plan.splice.new_handles) spliced.push_back(x.trie().path(h));
        spliced.insert(spliced.end(),
                       tq_words.begin() + plan.splice.start - 1 + plan.splice.old_len,
                       tq_words.end());
        CHECK(spliced == windows(t_new, q));

        // after removing vanished q-grams the trie equals a fresh build
        x.finish_edit(plan);
        CHECK(x.structurally_equal(QTst::build(t_new, q)));
        CHECK(x.trie().leaf_multiset() == qgram_set(t_new, q));
    }
}

TEST_CASE("a no-op edit leaves the structure unchanged") {
    Text t = Text::from_raw(kRunning);
    QTst x = QTst::build(t, 4);
    std::string canon = x.trie().canonical();
    EditPlan plan = x.plan_insert(t, 5, "");
    CHECK(plan.splice.old_len == plan.splice.new_handles.size());
    x.finish_edit(plan);
    CHECK(x.trie().canonical() == canon);
}

TEST_CASE("plan validation") {
    Text t = Text::from_raw("abab");
    QTst x = QTst::build(t, 3);
    CHECK_THROWS_AS(x.plan_insert(t, 0, "x"), std::out_of_range);
    CHECK_THROWS_AS(x.plan_insert(t, 7, "x"), std::out_of_range);
    CHECK_THROWS_AS(x.plan_delete(t, 1, 5), std::out_of_range);  // touches sentinel
    CHECK_THROWS_AS(x.plan_delete(t, 1, 0), std::out_of_range);
}
