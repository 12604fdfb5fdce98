#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "litscape/corpus.hpp"
#include "litscape/util/rng.hpp"
#include "litscape/util/strings.hpp"
#include "litscape/util/xml.hpp"

using namespace litscape;
using corpus::Stage;

namespace {

std::string make_csv(int rows, bool blank_abstract_row = false) {
    std::string text = "Title,Abstract,Year,DOI,Author Keywords\n";
    for (int i = 0; i < rows; ++i) {
        bool blank = blank_abstract_row && i == 1;
        text += "Paper " + std::to_string(i) + "," +
                (blank ? "" : "Study of topic " + std::to_string(i)) + ",2020,10.1000/x" +
                std::to_string(i) + ",lca; ml\n";
    }
    return text;
}

}  // namespace

TEST_CASE("ingest_metadata basic shapes") {
    SUBCASE("1509-row export yields 1509 identified records") {
        auto result = corpus::ingest_metadata_text(make_csv(1509));
        CHECK(result.records.size() == 1509);
        for (const auto& rec : result.records) CHECK(rec.stage == Stage::identified);
        CHECK(result.excludable.empty());
    }
    SUBCASE("header-only file yields empty list") {
        auto result = corpus::ingest_metadata_text("Title,Abstract,Year\n");
        CHECK(result.records.empty());
    }
    SUBCASE("blank abstract flagged no_abstract") {
        auto result = corpus::ingest_metadata_text(make_csv(3, true));
        CHECK(result.records.size() == 3);
        REQUIRE(result.excludable.size() == 1);
        CHECK(result.excludable[0].reason == corpus::ExclusionReason::no_abstract);
        CHECK(result.excludable[0].doc_id == result.records[1].id);
    }
}

TEST_CASE("ingest_metadata error paths") {
    CHECK_THROWS_WITH_AS(corpus::ingest_metadata("/nonexistent/file.csv"),
                         doctest::Contains("cannot open"), corpus::CorpusError);
    CHECK_THROWS_WITH_AS(corpus::ingest_metadata_text("Title,Year\nfoo,2019\n"),
                         doctest::Contains("Abstract"), corpus::CorpusError);
    std::string dup = "EID,Title,Abstract,Year\nid1,a,aa,2019\nid1,b,bb,2020\n";
    CHECK_THROWS_WITH_AS(corpus::ingest_metadata_text(dup), doctest::Contains("duplicate"),
                         corpus::CorpusError);
}

TEST_CASE("ingest_metadata column aliases and keywords") {
    auto result = corpus::ingest_metadata_text(
        "document title,ABSTRACT,Publication Year,doi,Index Keywords,Source title\n"
        "T,Body text,1999,10.1/z,alpha; beta,Journal X\n");
    REQUIRE(result.records.size() == 1);
    const auto& rec = result.records[0];
    CHECK(rec.title == "T");
    CHECK(rec.year == 1999);
    CHECK(rec.doi == "10.1/z");
    CHECK(rec.keywords == std::vector<std::string>{"alpha", "beta"});
    CHECK(rec.venue == "Journal X");
}

TEST_CASE("apply_screening funnel arithmetic") {
    SUBCASE("1509 identified with 971 exclusions -> 538 included") {
        auto result = corpus::ingest_metadata_text(make_csv(1509));
        std::vector<corpus::ScreeningDecision> decisions;
        for (int i = 0; i < 971; ++i)
            decisions.push_back({result.records[static_cast<std::size_t>(i)].id,
                                 corpus::Verdict::exclude,
                                 corpus::ExclusionReason::off_topic});
        auto screen = corpus::apply_screening(result.records, decisions);
        CHECK(screen.counts.identified == 1509);
        CHECK(screen.counts.screened_included == 538);
        // idempotent on re-application
        auto again = corpus::apply_screening(result.records, decisions);
        CHECK(again.counts.screened_included == 538);
    }
    SUBCASE("zero decisions includes everything") {
        auto result = corpus::ingest_metadata_text(make_csv(5));
        auto screen = corpus::apply_screening(result.records, {});
        CHECK(screen.counts.screened_included == 5);
    }
    SUBCASE("reasons preserved on 5-record fixture") {
        auto result = corpus::ingest_metadata_text(make_csv(5));
        std::vector<corpus::ScreeningDecision> decisions = {
            {result.records[0].id, corpus::Verdict::exclude, corpus::ExclusionReason::doc_type},
            {result.records[2].id, corpus::Verdict::exclude, corpus::ExclusionReason::language},
        };
        auto screen = corpus::apply_screening(result.records, decisions);
        CHECK(screen.counts.screened_included == 3);
        CHECK(result.records[0].stage == Stage::screened_out);
        CHECK(result.records[2].stage == Stage::screened_out);
        CHECK(result.records[1].stage == Stage::screened_in);
    }
    SUBCASE("decision for unknown id is an error") {
        auto result = corpus::ingest_metadata_text(make_csv(2));
        std::vector<corpus::ScreeningDecision> decisions = {
            {"ghost", corpus::Verdict::exclude, corpus::ExclusionReason::other}};
        CHECK_THROWS_AS(corpus::apply_screening(result.records, decisions),
                        corpus::CorpusError);
    }
}

TEST_CASE("screening is monotone: no backward stage moves") {
    auto result = corpus::ingest_metadata_text(make_csv(3));
    corpus::apply_screening(result.records, {});
    result.records[0].stage = Stage::fulltext_ok;
    result.records[0].fulltext = corpus::FullText{corpus::SourceFormat::plain, 3, "abc"};
    // an include decision cannot move a fulltext_ok record back
    corpus::apply_screening(result.records,
                            {{result.records[0].id, corpus::Verdict::include,
                              corpus::ExclusionReason::other}});
    CHECK(result.records[0].stage == Stage::fulltext_ok);
}

TEST_CASE("clean_abstract examples") {
    CHECK(corpus::clean_abstract("") == "");
    CHECK(corpus::clean_abstract("LCA\n\nmodel  \xE2\x98\x85 test") == "LCA model test");
    CHECK(corpus::clean_abstract("a  b\tc") == "a b c");
    CHECK(corpus::clean_abstract("keep .,;:()-% drop #$@^&*{}") == "keep .,;:()-% drop");
}

TEST_CASE("clean_fulltext examples") {
    CHECK(corpus::clean_fulltext("see https://x.y and a@b.c") == "see and");
    CHECK(corpus::clean_fulltext("environ-\nmental") == "environmental");
    CHECK(corpus::clean_fulltext("") == "");
    CHECK(corpus::clean_fulltext("doi:10.1016/j.jclepro.2020.1 cited") == "cited");
    CHECK(corpus::clean_fulltext("x 10.1234/abc y") == "x y");
    // hyphen inside a line survives
    CHECK(corpus::clean_fulltext("life-cycle view") == "life-cycle view");
}

TEST_CASE("cleaning idempotency and character closure") {
    rng::Xoshiro256 gen(7);
    const std::string alphabet =
        "abcXYZ019 .,;:()-%#$@\n\t\r\xC3\xA9\xE2\x98\x85/\\url https://a.b c@d.ef 10.1234/x-";
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        std::size_t len = gen.below(120);
        for (std::size_t i = 0; i < len; ++i)
            text.push_back(alphabet[gen.below(static_cast<std::uint32_t>(alphabet.size()))]);
        std::string once_a = corpus::clean_abstract(text);
        CHECK(corpus::clean_abstract(once_a) == once_a);
        std::string once_f = corpus::clean_fulltext(text);
        CHECK(corpus::clean_fulltext(once_f) == once_f);
        // closure: only allowed characters remain
        const auto& rules = corpus::CleaningRules::defaults();
        std::size_t at = 0;
        while (at < once_a.size()) {
            std::size_t before = at;
            auto cp = litscape::strings::decode_utf8(once_a, at);
            CHECK((rules.is_allowed(cp) || cp == ' '));
            REQUIRE(at > before);
        }
        // no identifier substrings survive in fulltext cleaning
        CHECK(once_f.find("http") == std::string::npos);
        CHECK(once_f.find('@') == std::string::npos);
    }
}

TEST_CASE("extract_xml_fulltext candidate tags") {
    SUBCASE("body tag wins") {
        auto ft = corpus::extract_xml_fulltext("<doc><body>Hello world</body></doc>");
        REQUIRE(ft.has_value());
        CHECK(ft->cleaned_text == "Hello world");
        CHECK(ft->source_format == corpus::SourceFormat::xml);
    }
    SUBCASE("raw-text fallback with known nesting") {
        std::string xml =
            "<full-text-retrieval-response><meta>skip me not</meta>"
            "<xocs:rawtext>Deep  fallback\ncontent</xocs:rawtext>"
            "</full-text-retrieval-response>";
        // candidate order: body, sections, rawtext; only rawtext matches
        auto ft = corpus::extract_xml_fulltext(xml);
        REQUIRE(ft.has_value());
        CHECK(ft->cleaned_text == "Deep fallback content");
    }
    SUBCASE("sections container beats rawtext") {
        std::string xml =
            "<doc><ce:sections><ce:para>First part</ce:para><ce:para>second</ce:para>"
            "</ce:sections><xocs:rawtext>nope</xocs:rawtext></doc>";
        auto ft = corpus::extract_xml_fulltext(xml);
        REQUIRE(ft.has_value());
        CHECK(ft->cleaned_text == "First part second");
    }
    SUBCASE("tagless document signals missing fulltext") {
        auto ft = corpus::extract_xml_fulltext("<doc><title>only meta</title></doc>");
        CHECK_FALSE(ft.has_value());
    }
    SUBCASE("malformed XML throws") {
        CHECK_THROWS_AS(corpus::extract_xml_fulltext("<doc><body>oops</doc>"),
                        xml::XmlError);
    }
}

TEST_CASE("prisma counts identity") {
    auto result = corpus::ingest_metadata_text(make_csv(10));
    corpus::apply_screening(result.records, {});
    for (int i = 0; i < 4; ++i) {
        result.records[static_cast<std::size_t>(i)].stage = Stage::fulltext_ok;
        result.records[static_cast<std::size_t>(i)].fulltext =
            corpus::FullText{corpus::SourceFormat::plain, 5, "text!"};
    }
    for (int i = 4; i < 7; ++i) {
        result.records[static_cast<std::size_t>(i)].stage = Stage::fulltext_ok;
        result.records[static_cast<std::size_t>(i)].fulltext =
            corpus::FullText{corpus::SourceFormat::xml, 5, "text!"};
    }
    auto counts = corpus::prisma_counts(result.records, 4, 3);
    CHECK(counts.fulltext_total == 7);
    CHECK(counts.fulltext_total == counts.open_access_retrieved + counts.publisher_retrieved);
    CHECK(counts.identified >= counts.screened_included);
    CHECK(counts.screened_included >= counts.with_doi);
    CHECK(counts.with_doi >= counts.fulltext_total);

    std::string json_text = corpus::prisma_to_json(counts);
    auto back = corpus::prisma_from_json(json_text);
    CHECK(back.fulltext_total == 7);
}

TEST_CASE("jsonl round trip preserves records") {
    auto result = corpus::ingest_metadata_text(make_csv(6, true));
    corpus::apply_screening(result.records, result.excludable);
    result.records[0].stage = Stage::fulltext_ok;
    result.records[0].fulltext = corpus::FullText{corpus::SourceFormat::xml, 42, "cleaned body"};
    std::string jsonl = corpus::to_jsonl(result.records);
    auto loaded = corpus::from_jsonl(jsonl);
    REQUIRE(loaded.size() == result.records.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].id == result.records[i].id);
        CHECK(loaded[i].stage == result.records[i].stage);
        CHECK(loaded[i].doi == result.records[i].doi);
        CHECK(loaded[i].keywords == result.records[i].keywords);
    }
    CHECK(loaded[0].fulltext.has_value());
    CHECK(loaded[0].fulltext->cleaned_text == "cleaned body");
}

TEST_CASE("jsonl rejects fulltext on wrong stage") {
    std::string line =
        R"({"id":"x","title":"t","abstract":"a","keywords":[],"year":2020,"venue":"",)"
        R"("stage":"screened_in","fulltext":{"source_format":"plain","raw_chars":1,"cleaned_text":"z"}})";
    CHECK_THROWS_AS(corpus::from_jsonl(line), corpus::CorpusError);
}
