#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "stringvec/hash.hpp"
#include "stringvec/table.hpp"

using namespace stringvec;

TEST_CASE("well-formed csv parses") {
    Table t = parse_csv("a,b\n1,x\n2,y\n3,z\n");
    CHECK(t.n_rows == 3);
    CHECK(t.columns.size() == 2);
    CHECK(t.columns[0].header == "a");
    CHECK(t.columns[1].values[2] == "z");
}

TEST_CASE("ragged rows are rejected") {
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,2\n1,2,3\n"),
                         doctest::Contains("inconsistent row width"), CsvError);
}

TEST_CASE("duplicate headers are rejected") {
    CHECK_THROWS_AS(parse_csv("a,a\n1,2\n"), CsvError);
}

TEST_CASE("missing file is an IO error") {
    CHECK_THROWS_AS(load_csv("/nonexistent/definitely_missing.csv"), CsvError);
}

TEST_CASE("quoting: embedded delimiters, quotes, newlines") {
    // Reference corpus parsed by hand; each expected cell frozen here.
    std::string csv =
        "name,note\n"
        "\"Smith, John\",plain\n"
        "empty,\"\"\n"
        "quote,\"say \"\"hi\"\"\"\n"
        "newline,\"line1\nline2\"\n"
        "delim only,\",\"\n";
    Table t = parse_csv(csv);
    CHECK(t.n_rows == 5);
    CHECK(t.columns[0].values[0] == "Smith, John");
    CHECK(t.columns[1].values[0] == "plain");
    CHECK(t.columns[1].values[1] == "");
    CHECK(t.columns[1].values[2] == "say \"hi\"");
    CHECK(t.columns[1].values[3] == "line1\nline2");
    CHECK(t.columns[1].values[4] == ",");
}

TEST_CASE("reference CSV corpus: 20 rows with mixed quoting") {
    std::string csv = "id,text\n";
    std::vector<std::string> expected;
    for (int i = 0; i < 20; ++i) {
        switch (i % 4) {
            case 0:
                csv += std::to_string(i) + ",plain" + std::to_string(i) + "\n";
                expected.push_back("plain" + std::to_string(i));
                break;
            case 1:
                csv += std::to_string(i) + ",\"with,comma" + std::to_string(i) + "\"\n";
                expected.push_back("with,comma" + std::to_string(i));
                break;
            case 2:
                csv += std::to_string(i) + ",\"q\"\"q" + std::to_string(i) + "\"\n";
                expected.push_back("q\"q" + std::to_string(i));
                break;
            default:
                csv += std::to_string(i) + ",\"nl\n" + std::to_string(i) + "\"\n";
                expected.push_back("nl\n" + std::to_string(i));
        }
    }
    Table t = parse_csv(csv);
    REQUIRE(t.n_rows == 20);
    for (int i = 0; i < 20; ++i)
        CHECK(t.columns[1].values[static_cast<std::size_t>(i)] == expected[static_cast<std::size_t>(i)]);
}

TEST_CASE("crlf and missing trailing newline") {
    Table t = parse_csv("a,b\r\n1,2\r\n3,4");
    CHECK(t.n_rows == 2);
    CHECK(t.columns[1].values[1] == "4");
}

TEST_CASE("blank lines are skipped, quoted-empty rows are kept") {
    Table t = parse_csv("a,b\n1,2\n\n3,4\n\n");
    CHECK(t.n_rows == 2);
    CHECK(t.columns[0].values[1] == "3");

    // Single-column table: a quoted empty cell is a real row.
    Table single = parse_csv("a\nx\n\"\"\ny\n");
    CHECK(single.n_rows == 3);
    CHECK(single.columns[0].values[1] == "");

    // Writer round-trips empty cells in single-column tables via quoting.
    Table back = parse_csv(csv_to_string(single));
    CHECK(back.n_rows == 3);
    CHECK(back.columns[0].values[1] == "");
}

TEST_CASE("custom delimiter and headerless mode") {
    Table t = parse_csv("1;2;3\n4;5;6\n", ';', false);
    CHECK(t.n_rows == 2);
    CHECK(t.columns.size() == 3);
    CHECK(t.columns[0].header == "col0");
    CHECK(t.columns[2].values[1] == "6");
}

TEST_CASE("unterminated quote is an error") {
    CHECK_THROWS_AS(parse_csv("a,b\n1,\"oops\n"), CsvError);
}

TEST_CASE("invalid utf-8 is rejected at load") {
    CHECK_THROWS_AS(parse_csv("a\n\xFF\xFE\n"), CsvError);
}

TEST_CASE("round trip: load, write, load is cell-identical") {
    SplitMix64 rng(12);
    static const std::string alphabet = "ab,\"\nxyz 123";
    for (int trial = 0; trial < 20; ++trial) {
        Table t;
        t.n_rows = 1 + rng.bounded(8);
        const int n_cols = 1 + static_cast<int>(rng.bounded(4));
        for (int c = 0; c < n_cols; ++c) {
            Column col;
            col.header = "c" + std::to_string(c);
            for (std::size_t r = 0; r < t.n_rows; ++r) {
                std::string cell;
                const auto len = rng.bounded(7);
                for (std::uint64_t k = 0; k < len; ++k)
                    cell.push_back(alphabet[static_cast<std::size_t>(rng.bounded(alphabet.size()))]);
                col.values.push_back(cell);
            }
            t.columns.push_back(std::move(col));
        }
        Table back = parse_csv(csv_to_string(t));
        REQUIRE(back.n_rows == t.n_rows);
        REQUIRE(back.columns.size() == t.columns.size());
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            CHECK(back.columns[c].header == t.columns[c].header);
            for (std::size_t r = 0; r < t.n_rows; ++r)
                CHECK(back.columns[c].values[r] == t.columns[c].values[r]);
        }
    }
}

TEST_CASE("parse_number accepts scientific notation and rejects junk") {
    CHECK(*parse_number("1.5") == 1.5);
    CHECK(*parse_number("-3e2") == -300.0);
    CHECK(*parse_number(" 42 ") == 42.0);
    CHECK(!parse_number(""));
    CHECK(!parse_number("12abc"));
    CHECK(!parse_number("inf"));
    CHECK(!parse_number("nan"));
    CHECK(!parse_number("1,5"));
}

TEST_CASE("parse_datetime handles dates and timestamps") {
    auto d = parse_datetime("2020-03-15 13:45:00");
    REQUIRE(d);
    CHECK(d->year == 2020);
    CHECK(d->month == 3);
    CHECK(d->day == 15);
    CHECK(d->weekday == 6);  // 2020-03-15 was a Sunday
    CHECK(d->hour == 13);

    auto date_only = parse_datetime("2020-03-15");
    REQUIRE(date_only);
    CHECK(date_only->hour == 0);

    CHECK(parse_datetime("2024-02-29"));   // leap day
    CHECK(!parse_datetime("2023-02-29"));  // not a leap year
    CHECK(!parse_datetime("2020-13-01"));
    CHECK(!parse_datetime("2020-00-10"));
    CHECK(!parse_datetime("20-01-01"));
    CHECK(!parse_datetime("hello"));
    CHECK(parse_datetime("1999/12/31"));
    CHECK(parse_datetime("2021-06-01T08:30"));
    CHECK(parse_datetime("2021-06-01T08:30:15.250Z"));

    auto monday = parse_datetime("2024-01-01");  // a Monday
    REQUIRE(monday);
    CHECK(monday->weekday == 0);
}

TEST_CASE("kind inference thresholds") {
    auto values = [](int n, const std::string& prefix) {
        std::vector<std::string> v;
        for (int i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
        return v;
    };

    CHECK(infer_kind(values(31, "s")) == ColumnKind::Text);
    CHECK(infer_kind(values(25, "s")) == ColumnKind::MidCardCategorical);
    CHECK(infer_kind(values(10, "s")) == ColumnKind::LowCardCategorical);
    CHECK(infer_kind(values(11, "s")) == ColumnKind::MidCardCategorical);
    CHECK(infer_kind({"1.5", "2", "-3e2"}) == ColumnKind::Numeric);
    CHECK(infer_kind({"2020-01-01", "1999-12-31 10:00:00", "2001-07-04"}) == ColumnKind::Datetime);
}

TEST_CASE("kind inference: 99% rule with dirty cells") {
    std::vector<std::string> values;
    for (int i = 0; i < 995; ++i) values.push_back(std::to_string(i) + ".5");
    for (int i = 0; i < 5; ++i) values.push_back("n/a");  // 0.5% junk
    CHECK(infer_kind(values) == ColumnKind::Numeric);

    std::vector<std::string> dirty;
    for (int i = 0; i < 90; ++i) dirty.push_back(std::to_string(i));
    for (int i = 0; i < 10; ++i) dirty.push_back("x" + std::to_string(i));  // 10% junk
    CHECK(infer_kind(dirty) == ColumnKind::Text);
}

TEST_CASE("kind inference ignores empty cells and is order independent") {
    std::vector<std::string> values{"", "1", "2", "", "3"};
    CHECK(infer_kind(values) == ColumnKind::Numeric);

    SplitMix64 rng(3);
    std::vector<std::string> col;
    for (int i = 0; i < 200; ++i) col.push_back("v" + std::to_string(i % 17));
    ColumnKind base = infer_kind(col);
    for (int trial = 0; trial < 5; ++trial) {
        for (std::size_t i = 0; i + 1 < col.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.bounded(col.size() - i));
            std::swap(col[i], col[j]);
        }
        CHECK(infer_kind(col) == base);
    }
}

TEST_CASE("binarize: median split with ties to zero") {
    Table t = parse_csv("x,y\na,1\nb,2\nc,3\nd,4\n");
    SupervisedDataset ds = binarize_and_balance(t, "y", 0);
    CHECK(ds.labels == std::vector<int>{0, 0, 1, 1});
    CHECK(ds.source_rows == std::vector<int>{0, 1, 2, 3});
    CHECK(ds.features.columns.size() == 1);

    // Odd count: median element itself lands in class 0.
    Table t2 = parse_csv("x,y\na,1\nb,2\nc,3\n");
    SupervisedDataset ds2 = binarize_and_balance(t2, "y", 0);
    CHECK(ds2.labels.size() == 2);  // balanced 1/1 after downsampling majority
}

TEST_CASE("balance: majority downsampled to equality") {
    std::string csv = "x,y\n";
    for (int i = 0; i < 80; ++i) csv += "r" + std::to_string(i) + ",yes\n";
    for (int i = 0; i < 20; ++i) csv += "s" + std::to_string(i) + ",no\n";
    Table t = parse_csv(csv);
    SupervisedDataset ds = binarize_and_balance(t, "y", 7);
    int pos = 0, neg = 0;
    for (int y : ds.labels) (y == 1 ? pos : neg) += 1;
    CHECK(pos == 20);
    CHECK(neg == 20);

    SupervisedDataset again = binarize_and_balance(t, "y", 7);
    CHECK(again.source_rows == ds.source_rows);

    SupervisedDataset other = binarize_and_balance(t, "y", 8);
    CHECK(other.source_rows != ds.source_rows);
}

TEST_CASE("binary categorical target: lexicographic class order") {
    Table t = parse_csv("x,y\na,no\nb,yes\nc,no\nd,yes\n");
    SupervisedDataset ds = binarize_and_balance(t, "y", 0);
    CHECK(ds.labels == std::vector<int>{0, 1, 0, 1});  // "no" < "yes"
}

TEST_CASE("single-valued target is an error") {
    Table t = parse_csv("x,y\na,1\nb,1\n");
    CHECK_THROWS_AS(binarize_and_balance(t, "y", 0), std::invalid_argument);
}

TEST_CASE("group keys follow retained rows") {
    Table t = parse_csv("x,g,y\na,g1,1\nb,g1,2\nc,g2,3\nd,g2,4\n");
    SupervisedDataset ds = binarize_and_balance(t, "y", 0, "g");
    REQUIRE(ds.group_keys.size() == ds.labels.size());
    CHECK(ds.group_keys == std::vector<std::string>{"g1", "g1", "g2", "g2"});
    CHECK(ds.features.column_index("g") >= 0);

    SupervisedDataset dropped = binarize_and_balance(t, "y", 0, "g", true);
    CHECK(dropped.features.column_index("g") == -1);
}
