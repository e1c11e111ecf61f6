#include <doctest.h>

#include "qsf/io.hpp"
#include "test_helpers.hpp"

using namespace qsf;
using namespace qsf::testing;

TEST_CASE("operator round trip") {
    Rng rng(121);
    for (int trial = 0; trial < 20; ++trial) {
        Operator a(random_ginibre(rng, 2 + trial % 3));
        Operator back = operator_from_json(to_json(a));
        CHECK((a.m - back.m).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("state round trip") {
    Rng rng(122);
    for (int trial = 0; trial < 20; ++trial) {
        StateVector psi = random_state(rng, 2 + trial % 4);
        StateVector back = state_from_json(to_json(psi));
        CHECK((psi.v - back.v).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("instrument round trip") {
    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    Instrument inst = Instrument::projective({Operator(p0), Operator(p1)});
    inst.labels = {"ground", "excited"};
    Instrument back = instrument_from_json(to_json(inst));
    REQUIRE(back.kraus.size() == 2);
    CHECK(back.labels == inst.labels);
    CHECK(back.weights == inst.weights);
    for (int i = 0; i < 2; ++i)
        CHECK((back.kraus[i].m - inst.kraus[i].m).cwiseAbs().maxCoeff() == 0.0);
    back.validate();
}

TEST_CASE("malformed payloads are rejected") {
    nlohmann::json j;
    j["dim"] = 2;
    j["entries"] = {{1.0, 0.0}};  // wrong count
    CHECK_THROWS(operator_from_json(j));

    nlohmann::json s;
    s["dim"] = 3;
    s["amplitudes"] = {{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS(state_from_json(s));
}
