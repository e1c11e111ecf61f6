#include "qsf/io.hpp"

namespace qsf {

using nlohmann::json;

namespace {

json complex_array(const Mat& m) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            entries.push_back({m(i, j).real(), m(i, j).imag()});
    return entries;
}

}  // namespace

json to_json(const Operator& op) {
    return json{{"dim", op.dim()}, {"entries", complex_array(op.m)}};
}

json to_json(const StateVector& psi) {
    json amps = json::array();
    for (Eigen::Index i = 0; i < psi.dim(); ++i)
        amps.push_back({psi.v(i).real(), psi.v(i).imag()});
    return json{{"dim", psi.dim()}, {"amplitudes", amps}};
}

json to_json(const Instrument& inst) {
    json outcomes = json::array();
    for (std::size_t i = 0; i < inst.kraus.size(); ++i)
        outcomes.push_back({{"label", inst.labels[i]},
                            {"weight", inst.weights[i]},
                            {"op", to_json(inst.kraus[i])}});
    return json{{"outcomes", outcomes}};
}

Operator operator_from_json(const json& j) {
    Eigen::Index n = j.at("dim").get<Eigen::Index>();
    const auto& entries = j.at("entries");
    if (Eigen::Index(entries.size()) != n * n)
        throw PreconditionError("operator_from_json: entry count != dim^2");
    Mat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& e = entries[i * n + k];
            m(i, k) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return Operator(m);
}

StateVector state_from_json(const json& j) {
    Eigen::Index n = j.at("dim").get<Eigen::Index>();
    const auto& amps = j.at("amplitudes");
    if (Eigen::Index(amps.size()) != n)
        throw PreconditionError("state_from_json: amplitude count != dim");
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = Complex(amps[i].at(0).get<double>(), amps[i].at(1).get<double>());
    return StateVector(v);
}

Instrument instrument_from_json(const json& j) {
    Instrument inst;
    for (const auto& o : j.at("outcomes")) {
        inst.labels.push_back(o.at("label").get<std::string>());
        inst.weights.push_back(o.at("weight").get<double>());
        inst.kraus.push_back(operator_from_json(o.at("op")));
    }
    return inst;
}

}  // namespace qsf
