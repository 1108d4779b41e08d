#include <doctest.h>

#include <cmath>

#include "madurl/lexical.hpp"
#include "test_helpers.hpp"

using namespace madurl;

namespace {

LexicalContext make_ctx(const NgramModel* uni = nullptr, const NgramModel* bi = nullptr,
                        const NgramModel* tri = nullptr) {
    const auto& res = testutil::resources();
    LexicalContext ctx;
    ctx.tlds = &res.tlds;
    ctx.dictionary = &res.dictionary;
    ctx.unigram = uni;
    ctx.bigram = bi;
    ctx.trigram = tri;
    ctx.sensitive_words = &res.sensitive_words;
    ctx.suspicious_domains = &res.suspicious_set;
    return ctx;
}

std::array<double, 40> linguistic(const std::string& url) {
    const auto& res = testutil::resources();
    const RawUrl raw{url};
    return extract_linguistic(parse_url(raw, res.tlds), raw, make_ctx());
}

}  // namespace

TEST_CASE("URLLength matches the published example") {
    // 51 characters.
    CHECK(linguistic("https://www.example.com/seo-tools/count-characters/")[0] == 51.0);
}

TEST_CASE("ratio and count slots") {
    const auto& res = testutil::resources();
    const RawUrl raw{"abc123.com"};
    const auto f = extract_linguistic(parse_url(raw, res.tlds), raw, make_ctx());
    CHECK(f[3] == doctest::Approx(3.0 / 6.0));  // digits / letters

    SUBCASE("digit-alphabet ratio on balanced string") {
        const RawUrl r2{"abc123"};
        const auto g = extract_linguistic(parse_url(r2, res.tlds), r2, make_ctx());
        CHECK(g[3] == 1.0);
    }
    SUBCASE("dot and at counts") {
        const RawUrl r3{"a.b.c"};
        CHECK(extract_linguistic(parse_url(r3, res.tlds), r3, make_ctx())[10] == 2.0);
        const RawUrl r4{"a@b.c"};
        CHECK(extract_linguistic(parse_url(r4, res.tlds), r4, make_ctx())[20] == 1.0);
    }
}

TEST_CASE("component lengths come from the parsed URL") {
    const auto f = linguistic("https://host.com/abc?x=12#frag");
    CHECK(f[31] == 8.0);   // host
    CHECK(f[32] == 4.0);   // path
    CHECK(f[33] == 4.0);   // query
    CHECK(f[14] == 1.0);   // '#'
    CHECK(f[26] == 1.0);   // https present
}

TEST_CASE("token flags") {
    CHECK(linguistic("http://a.com/setup.exe")[2] == 1.0);
    CHECK(linguistic("ftp://files.example.com/x")[36] == 1.0);
    CHECK(linguistic("http://a.com/app.js")[37] == 1.0);
    CHECK(linguistic("http://a.com/site.css")[39] == 1.0);
    CHECK(linguistic("http://www.wordforhttps.in/x")[30] == 1.0);
    CHECK(linguistic("http://www.a.com/x")[35] == 0.0);  // www present
    CHECK(linguistic("http://a.com/x")[35] == 1.0);      // www absent
    CHECK(linguistic("http://a.com/deadbeefdeadbeef01/x")[23] == 1.0);  // 16+ hex chars
    CHECK(linguistic("http://a.com/short/x")[23] == 0.0);
}

TEST_CASE("special, letter and digit counts never exceed the length") {
    Rng rng(7);
    const std::string alphabet = "abcXYZ0123.-/?#=&%_~:@(){}[]*,";
    const auto& res = testutil::resources();
    for (int i = 0; i < 200; ++i) {
        std::string s = "h";
        const std::size_t len = 1 + rng.uniform_int(60);
        for (std::size_t j = 0; j < len; ++j) s += alphabet[rng.uniform_int(alphabet.size())];
        const RawUrl raw{s};
        ParsedUrl u;
        try {
            u = parse_url(raw, res.tlds);
        } catch (const UnparsableUrl&) {
            continue;
        }
        const auto f = extract_linguistic(u, raw, make_ctx());
        CHECK(f[9] + f[8] + f[7] <= f[0]);
    }
}

TEST_CASE("order-free counts ignore query permutation") {
    const auto a = linguistic("http://x.com/p?a=1&b=2&c=3");
    const auto b = linguistic("http://x.com/p?c=3&b=2&a=1");
    CHECK(a[10] == b[10]);  // dots
    CHECK(a[15] == b[15]);  // '='
    CHECK(a[17] == b[17]);  // '&'
}

TEST_CASE("classify_domain_word follows the dictionary routing") {
    const auto& dict = testutil::resources().dictionary;

    SUBCASE("dictionary noun is english + meaningful") {
        const auto f = classify_domain_word("apple", dict);
        CHECK(f.is_english == 1);
        CHECK(f.is_meaningful == 1);
        CHECK(f.is_pronounceable == 0);
        CHECK(f.is_random == 0);
    }
    SUBCASE("unsegmentable string is random") {
        const auto f = classify_domain_word("xqzvkt", dict);
        CHECK(f.is_english == 0);
        CHECK(f.is_meaningful == 0);
        CHECK(f.is_pronounceable == 0);
        CHECK(f.is_random == 1);
    }
    SUBCASE("verb/adjective-only cover is pronounceable") {
        const auto f = classify_domain_word("verifyupdate", dict);  // verb + verb
        CHECK(f.is_meaningful == 0);
        CHECK(f.is_pronounceable == 1);
    }
    SUBCASE("empty domain errors") {
        CHECK_THROWS_AS(classify_domain_word("", dict), EmptyDomain);
    }
    SUBCASE("empty dictionary errors") {
        const PosDictionary empty;
        CHECK_THROWS_AS(classify_domain_word("apple", empty), EmptyDictionary);
    }
    SUBCASE("exactly one routing flag is set") {
        const auto& res = testutil::resources();
        Rng rng(13);
        for (int i = 0; i < 300; ++i) {
            std::string s;
            const std::size_t len = 1 + rng.uniform_int(12);
            for (std::size_t j = 0; j < len; ++j)
                s += static_cast<char>('a' + rng.uniform_int(26));
            const auto f = classify_domain_word(s, res.dictionary);
            CHECK(f.is_meaningful + f.is_pronounceable + f.is_random == 1);
        }
    }
}

TEST_CASE("ngram_train counting matches hand counts") {
    const NgramModel bi = ngram_train({"ab", "ab", "ac"}, 2);
    // Context "a" continues with 'b' twice and 'c' once.
    CHECK(bi.prob_ml("a", 'b') == doctest::Approx(2.0 / 3.0));
    CHECK(bi.prob_ml("a", 'c') == doctest::Approx(1.0 / 3.0));

    const NgramModel uni = ngram_train({"a"}, 1);
    CHECK(uni.prob_ml("", 'a') == doctest::Approx(1.0));
    CHECK(uni.gram_count("a") == 1);

    CHECK_THROWS_AS(ngram_train({}, 1), EmptyCorpus);
}

TEST_CASE("smoothed distribution sums to one over the alphabet") {
    const NgramModel bi = ngram_train({"apple", "orange", "banana"}, 2);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789-$";
    REQUIRE(alphabet.size() == static_cast<std::size_t>(bi.alphabet_size()));
    for (const std::string context : {"a", "p", "z"}) {
        double sum = 0.0;
        for (char c : alphabet) sum += bi.prob_smoothed(context, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("ngram_score basics") {
    const NgramModel bi = ngram_train({"apple", "people", "purple"}, 2);
    SUBCASE("short input returns the smoothing floor") {
        CHECK(bi.score("x") == doctest::Approx(std::log(1.0 / bi.alphabet_size())));
    }
    SUBCASE("deterministic") {
        CHECK(bi.score("apple") == bi.score("apple"));
    }
    SUBCASE("finite on adversarial input") {
        CHECK(std::isfinite(bi.score("zzzzqqqq0000----")));
        CHECK(std::isfinite(bi.score("")));
    }
}

TEST_CASE("in-corpus domains outscore uniform random strings on average") {
    // Statistical oracle: train on dictionary words, compare mean scores.
    const auto& words = testutil::resources().sensitive_words;
    std::vector<std::string> corpus;
    for (const auto& w : testutil::resources().suspicious_list) corpus.push_back(w);
    corpus.insert(corpus.end(), words.begin(), words.end());
    corpus.insert(corpus.end(), {"example", "apple",  "orange", "banana", "window",
                                 "library", "museum", "garden", "market", "bridge"});
    const NgramModel bi = ngram_train(corpus, 2);

    Rng rng(4242);
    double in_sum = 0.0, rand_sum = 0.0;
    int trials = 0;
    for (int t = 0; t < 150; ++t) {
        const std::string& real = corpus[rng.uniform_int(corpus.size())];
        if (real.size() < 3) continue;
        std::string fake;
        for (std::size_t i = 0; i < real.size(); ++i)
            fake += static_cast<char>('a' + rng.uniform_int(26));
        in_sum += bi.score(real);
        rand_sum += bi.score(fake);
        ++trials;
    }
    REQUIRE(trials >= 100);
    CHECK(in_sum / trials > rand_sum / trials);
}

TEST_CASE("sensitive word count and suspicious membership") {
    const auto& res = testutil::resources();
    const std::vector<std::string> four = {"secure", "account", "webscr", "login"};

    SUBCASE("three hits in the classic example") {
        const auto r = sensitive_and_suspicious("secure-login.example.com/account", "example.com",
                                                four, res.suspicious_set);
        CHECK(r.sensitive_word_count == 3);
        CHECK(r.in_suspicious_list == 0);
    }
    SUBCASE("suspicious membership") {
        const auto r = sensitive_and_suspicious("paypa1.com/", "paypa1.com", four,
                                                res.suspicious_set);
        CHECK(r.in_suspicious_list == 1);
    }
    SUBCASE("clean input") {
        const auto r = sensitive_and_suspicious("example.org/about", "example.org", four,
                                                res.suspicious_set);
        CHECK(r.sensitive_word_count == 0);
        CHECK(r.in_suspicious_list == 0);
    }
}

TEST_CASE("extract_lexical fills all 49 slots with the human-engineered block") {
    const auto& res = testutil::resources();
    const NgramModel uni = ngram_train({"example", "apple"}, 1);
    const NgramModel bi = ngram_train({"example", "apple"}, 2);
    const NgramModel tri = ngram_train({"example", "apple"}, 3);
    LexicalContext ctx = make_ctx(&uni, &bi, &tri);

    const RawUrl raw{"https://www.apple.com/secure/login"};
    const auto f = extract_lexical(parse_url(raw, res.tlds), raw, ctx);
    CHECK(f[40] == 1.0);  // apple is in the dictionary
    CHECK(f[41] == 1.0);  // and a noun
    CHECK(f[43] == 0.0);
    CHECK(f[47] == 2.0);  // secure + login
    CHECK(std::isfinite(f[44]));
    CHECK(std::isfinite(f[45]));
    CHECK(std::isfinite(f[46]));
}

TEST_CASE("URLLength dominates host and path lengths") {
    const auto& res = testutil::resources();
    Rng rng(2711);
    for (int t = 0; t < 200; ++t) {
        // Random but well-formed URLs.
        std::string url = rng.uniform_double() < 0.5 ? "https://" : "";
        url += "sub" + std::to_string(rng.uniform_int(100)) + ".example" +
               std::to_string(rng.uniform_int(50)) + ".com";
        const std::size_t segs = rng.uniform_int(4);
        for (std::size_t s = 0; s < segs; ++s)
            url += "/p" + std::to_string(rng.uniform_int(1000));
        const RawUrl raw{url};
        const ParsedUrl u = parse_url(raw, res.tlds);
        const auto f = extract_linguistic(u, raw, [&] {
            LexicalContext ctx;
            ctx.tlds = &res.tlds;
            return ctx;
        }());
        if (!u.host.empty() && !u.path.empty()) CHECK(f[0] >= f[31] + f[32]);
    }
}
