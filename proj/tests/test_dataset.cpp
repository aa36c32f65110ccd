#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "dataset.hpp"

using namespace crack;

namespace {

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& content) {
        static int counter = 0;
        path = (std::filesystem::temp_directory_path() /
                ("crack_test_" + std::to_string(getpid()) + "_" +
                 std::to_string(counter++) + ".csv"))
                   .string();
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("robust_min_diff ignores outlier gaps") {
    std::vector<double> vals = {0.0, 0.5, 1.0, 1.5, 100.0};
    CHECK(robust_min_diff(vals, 0.1) == doctest::Approx(0.5));
}

TEST_CASE("robust_min_diff flags constant columns") {
    bool constant = false;
    CHECK(robust_min_diff({3.0, 3.0, 3.0}, 0.1, &constant) == doctest::Approx(1.0));
    CHECK(constant);
}

TEST_CASE("schema inference") {
    std::vector<std::string> header = {"a", "b", "c"};
    std::vector<std::vector<std::string>> rows = {
        {"1.5", "yes", "red"},
        {"2.5", "no", "green"},
        {"3.0", "yes", "blue"},
        {"4.0", "no", "red"},
    };
    auto types = infer_schema(header, rows);
    CHECK(types[0] == AttrType::Numeric);
    CHECK(types[1] == AttrType::Binary);
    CHECK(types[2] == AttrType::Categorical);
}

TEST_CASE("selector and type-string parsing") {
    CHECK(parse_selector("0,2-4") == std::vector<int>{0, 2, 3, 4});
    CHECK_THROWS_AS(parse_selector("3-1"), InputError);
    CHECK_THROWS_AS(parse_selector(""), InputError);

    auto types = parse_type_string("b,c,n");
    REQUIRE(types.size() == 3);
    CHECK(types[0] == AttrType::Binary);
    CHECK(types[1] == AttrType::Categorical);
    CHECK(types[2] == AttrType::Numeric);
    CHECK_THROWS_AS(parse_type_string("b,x"), InputError);
}

TEST_CASE("csv load end to end") {
    TempCsv f("x,y\n1.0,a\n2.0,b\n3.0,a\n");
    LoadOptions lo;
    lo.x_selector = "0";
    lo.y_selector = "1";
    Dataset d = load_csv(f.path, lo);
    REQUIRE(d.n == 3);
    REQUIRE(d.m() == 2);
    CHECK(d.attributes[0].type == AttrType::Numeric);
    CHECK(d.attributes[0].resolution == doctest::Approx(1.0));
    CHECK(d.attributes[1].type == AttrType::Binary);
    CHECK(d.attributes[1].category_count == 2);
    // first-appearance coding
    CHECK(d.attributes[1].codes == std::vector<int>{0, 1, 0});
    CHECK(d.x_indices == std::vector<int>{0});
    CHECK(d.y_indices == std::vector<int>{1});
}

TEST_CASE("load errors") {
    TempCsv ragged("x,y\n1,2\n3\n");
    CHECK_THROWS_AS(load_csv(ragged.path, {}), InputError);

    TempCsv missing("x,y\n1,\n2,3\n");
    CHECK_THROWS_AS(load_csv(missing.path, {}), InputError);

    TempCsv ok("x,y\n1,2\n3,4\n");
    LoadOptions overlap;
    overlap.x_selector = "0,1";
    overlap.y_selector = "1";
    CHECK_THROWS_AS(load_csv(ok.path, overlap), InputError);

    LoadOptions out_of_range;
    out_of_range.x_selector = "0";
    out_of_range.y_selector = "5";
    CHECK_THROWS_AS(load_csv(ok.path, out_of_range), InputError);

    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", {}), InputError);
}

TEST_CASE("type override rejects impossible binary") {
    TempCsv f("c\nred\ngreen\nblue\n");
    LoadOptions lo;
    lo.schema_override = {AttrType::Binary};
    CHECK_THROWS_AS(load_csv(f.path, lo), InputError);
}

TEST_CASE("domain size") {
    Attribute nom;
    nom.type = AttrType::Categorical;
    nom.category_count = 4;
    CHECK(domain_size(nom) == doctest::Approx(4.0));

    Attribute num;
    num.type = AttrType::Numeric;
    num.vmin = 0.0;
    num.vmax = 1.0;
    num.resolution = 0.01;
    CHECK(domain_size(num) == doctest::Approx(101.0));
}

TEST_CASE("swap_sides exchanges the selectors only") {
    Dataset d;
    d.n = 1;
    d.attributes.resize(3);
    d.x_indices = {0};
    d.y_indices = {1, 2};
    Dataset s = swap_sides(d);
    CHECK(s.x_indices == std::vector<int>{1, 2});
    CHECK(s.y_indices == std::vector<int>{0});
    CHECK(s.m() == 3);
}

TEST_CASE("to_csv round-trips through load") {
    TempCsv f("x,y\n1.25,a\n2.5,b\n3.75,a\n");
    Dataset d = load_csv(f.path, {});
    TempCsv g(to_csv(d));
    Dataset e = load_csv(g.path, {});
    REQUIRE(e.n == d.n);
    REQUIRE(e.m() == d.m());
    CHECK(e.attributes[0].values == d.attributes[0].values);
    CHECK(e.attributes[1].codes == d.attributes[1].codes);
    CHECK(e.attributes[1].categories == d.attributes[1].categories);
}

TEST_CASE("constant detection") {
    TempCsv f("x,y\n5,a\n5,a\n5,b\n");
    Dataset d = load_csv(f.path, {});
    CHECK(d.attributes[0].constant);
    CHECK(!d.attributes[1].constant);
}
