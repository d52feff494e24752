/**
 * @file json_io.cpp
 * @brief JSON (de)serialization for tensors and decompositions.
 */
#include "htr/json_io.hpp"

#include <fstream>

namespace htr {

namespace {

nlohmann::json scalar_to_json(const cplx& s, Field f) {
    if (f == Field::real) return s.real();
    return nlohmann::json::array({s.real(), s.imag()});
}

cplx scalar_from_json(const nlohmann::json& j, Field f) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        const cplx v{j[0].get<double>(), j[1].get<double>()};
        if (f == Field::real && v.imag() != 0.0) {
            throw IoError("real-tagged scalar has a nonzero imaginary part");
        }
        return v;
    }
    throw IoError("malformed scalar: expected a number or [re, im]");
}

Field field_from_json(const nlohmann::json& j) {
    const auto s = j.get<std::string>();
    if (s == "real") return Field::real;
    if (s == "complex") return Field::complex;
    throw IoError("unknown field tag: " + s);
}

}  // namespace

nlohmann::json to_json(const Tensor& t) {
    nlohmann::json data = nlohmann::json::array();
    for (const auto& e : t.data()) data.push_back(scalar_to_json(e, t.field()));
    return {{"order", t.order()},
            {"field", to_string(t.field())},
            {"data", std::move(data)}};
}

Tensor tensor_from_json(const nlohmann::json& j) {
    try {
        const int order = j.at("order").get<int>();
        const Field field = field_from_json(j.at("field"));
        const auto& data = j.at("data");
        if (!data.is_array()) throw IoError("\"data\" must be an array");
        Tensor t(order, field);
        if (data.size() != t.size()) {
            throw IoError("\"data\" length does not match 2^order");
        }
        for (std::size_t i = 0; i < t.size(); ++i) {
            t.data()[i] = scalar_from_json(data[i], field);
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed tensor JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("malformed tensor JSON: ") + e.what());
    }
}

nlohmann::json to_json(const Decomposition& d) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : d.terms) {
        nlohmann::json factors = nlohmann::json::array();
        for (const auto& v : term.factors) {
            factors.push_back(nlohmann::json::array(
                {scalar_to_json(v[0], d.field), scalar_to_json(v[1], d.field)}));
        }
        terms.push_back(std::move(factors));
    }
    return {{"order", d.order},
            {"field", to_string(d.field)},
            {"terms", std::move(terms)}};
}

Decomposition decomposition_from_json(const nlohmann::json& j) {
    try {
        Decomposition d;
        d.order = j.at("order").get<int>();
        d.field = field_from_json(j.at("field"));
        for (const auto& jt : j.at("terms")) {
            std::vector<Vec2> factors;
            for (const auto& jv : jt) {
                if (!jv.is_array() || jv.size() != 2) {
                    throw IoError("factor vector must have length 2");
                }
                factors.push_back(Vec2{scalar_from_json(jv[0], d.field),
                                       scalar_from_json(jv[1], d.field)});
            }
            if (static_cast<int>(factors.size()) != d.order) {
                throw IoError("term order does not match decomposition order");
            }
            d.terms.emplace_back(std::move(factors));
        }
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed decomposition JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("malformed decomposition JSON: ") + e.what());
    }
}

Tensor read_tensor_file(const std::string& path) {
    return tensor_from_json(read_json_file(path));
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace htr
