#include <doctest.h>

#include "opchain/gen.hpp"
#include "opchain/io.hpp"

using namespace opchain;

TEST_CASE("matrices and drivings survive a JSON round trip") {
    SplitMix64 rng(1);
    const Mat m = random_matrix(rng, 3, 2);
    CHECK(max_abs_diff(matrix_from_json(matrix_to_json(m)), m) == 0.0);
    // through text as well, at full precision
    CHECK(max_abs_diff(matrix_from_json(parse_json_text(matrix_to_json(m).dump())), m) == 0.0);

    const StepDriving dr = random_driving(2, 2, 3, 3, 1.5);
    const StepDriving back = driving_from_json(parse_json_text(driving_to_json(dr).dump()));
    CHECK(back.grid == dr.grid);
    REQUIRE(back.J() == dr.J());
    for (int j = 0; j < dr.J(); ++j) {
        CHECK(back.pieces[j].k == dr.pieces[j].k);
        CHECK(max_abs_diff(back.pieces[j].X, dr.pieces[j].X) == 0.0);
        CHECK(max_abs_diff(back.pieces[j].W, dr.pieces[j].W) == 0.0);
    }
}

TEST_CASE("row-major layout") {
    const json j = parse_json_text(R"({"dims": [2, 2], "data": [[1, 0], [2, 0], [3, 0], [0, 4]]})");
    const Mat m = matrix_from_json(j);
    CHECK(m(0, 1) == cplx(2, 0));
    CHECK(m(1, 0) == cplx(3, 0));
    CHECK(m(1, 1) == cplx(0, 4));
}

TEST_CASE("syntax errors report line and column") {
    try {
        parse_json_text("{\n  \"T\": 1.0,\n  \"grid\": [0.0, 1.0\n  \"pieces\": []\n}");
        FAIL("no throw");
    } catch (const InputError& e) {
        CHECK(e.location.rfind("line 4, column", 0) == 0);
    }
}

TEST_CASE("semantic errors report a JSON pointer") {
    auto location_of = [](const std::string& text) {
        try {
            driving_from_json(parse_json_text(text));
        } catch (const InputError& e) {
            return e.location;
        }
        return std::string("none");
    };
    const std::string piece = R"({"d": 1, "k": 1, "X": {"dims": [1, 1], "data": [[0.5, 0]]}, "W": {"dims": [1, 1], "data": [[1, 0]]}})";
    CHECK(location_of(R"({"T": 1, "grid": [0, 1], "pieces": [)" + piece + "]}") == "none");
    CHECK(location_of(R"({"grid": [0, 1], "pieces": [)" + piece + "]}") == "/");
    CHECK(location_of(R"({"T": 1, "grid": [0, "a"], "pieces": [)" + piece + "]}") == "/grid/1");
    const std::string wrong_k = R"({"d": 1, "k": 2, "X": {"dims": [1, 1], "data": [[0.5, 0]]}, "W": {"dims": [1, 1], "data": [[1, 0]]}})";
    CHECK(location_of(R"({"T": 1, "grid": [0, 1], "pieces": [)" + wrong_k + "]}") == "/pieces/0");
    const std::string short_data = R"({"d": 1, "k": 1, "X": {"dims": [1, 1], "data": []}, "W": {"dims": [1, 1], "data": [[1, 0]]}})";
    CHECK(location_of(R"({"T": 1, "grid": [0, 1], "pieces": [)" + short_data + "]}") == "/pieces/0/X/data");
    CHECK(location_of(R"({"T": 2, "grid": [0, 1], "pieces": [)" + piece + "]}") != "none");
}

TEST_CASE("generated drivings are reproducible and bounded") {
    const StepDriving a = random_driving(99, 2, 3, 4, 2.0), b = random_driving(99, 2, 3, 4, 2.0);
    CHECK(driving_to_json(a).dump() == driving_to_json(b).dump());
    CHECK(driving_to_json(a).dump() != driving_to_json(random_driving(100, 2, 3, 4, 2.0)).dump());
    CHECK(a.grid == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    CHECK(a.M() <= 2.0 + 1e-12);
    for (const GeneralizedLaw& p : a.pieces) CHECK(op_norm(p.W) <= 1.0 + 1e-12);
    CHECK_THROWS_AS(random_driving(1, 4, 5, 2, 1.0), BudgetError);
    CHECK_THROWS_AS(random_driving(1, 2, 2, kMaxGenPieces + 1, 1.0), BudgetError);
}
