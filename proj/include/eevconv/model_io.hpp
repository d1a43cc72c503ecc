// Copyright 2026 The eevconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <complex>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eevconv/dense.hpp"
#include "eevconv/local_operator.hpp"
#include "eevconv/util.hpp"

// Model definition files are JSON:
//   { "d_loc": 2, "k": 2,
//     "terms": [ { "coeff": [1.0, 0.0], "string": { "1": "Z", "2": "Z" } }, ... ] }
// Site keys are 1-based strings, letters are "X"/"Y"/"Z", and the empty
// string object denotes the identity (rejected here: h must be traceless).

namespace eevconv {

class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct Model {
    LocalOperator h;  // canonical form of the loaded term
    int d_loc = 2;
};

namespace detail {

inline LocalOperator local_operator_from_json(const nlohmann::json& j,
                                              const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    if (!j.contains("k") || !j["k"].is_number_integer())
        throw ParseError(where + ".k: expected an integer window");
    const int window = j["k"].get<int>();
    if (window < 1) throw ParseError(where + ".k: window must be >= 1");
    if (!j.contains("terms") || !j["terms"].is_array())
        throw ParseError(where + ".terms: expected an array");

    std::vector<Term> terms;
    int idx = 0;
    for (const auto& jt : j["terms"]) {
        const std::string tw = where + ".terms[" + std::to_string(idx++) + "]";
        if (!jt.is_object()) throw ParseError(tw + ": expected an object");
        if (!jt.contains("coeff") || !jt["coeff"].is_array() || jt["coeff"].size() != 2 ||
            !jt["coeff"][0].is_number() || !jt["coeff"][1].is_number())
            throw ParseError(tw + ".coeff: expected [re, im]");
        std::complex<double> coeff(jt["coeff"][0].get<double>(), jt["coeff"][1].get<double>());
        if (!jt.contains("string") || !jt["string"].is_object())
            throw ParseError(tw + ".string: expected an object of site -> letter");

        PauliString::Letters letters;
        for (const auto& [key, val] : jt["string"].items()) {
            const std::string sw = tw + ".string[\"" + key + "\"]";
            int site = 0;
            try {
                site = std::stoi(key);
            } catch (const std::exception&) {
                throw ParseError(sw + ": site key is not an integer");
            }
            if (site < 1 || site > window)
                throw ParseError(sw + ": site outside [1, " + std::to_string(window) + "]");
            if (!val.is_string() || val.get<std::string>().size() != 1)
                throw ParseError(sw + ": expected a letter \"X\", \"Y\" or \"Z\"");
            const char c = val.get<std::string>()[0];
            auto p = pauli_from_char(c);
            if (!p)
                throw ParseError(sw + ": invalid letter \"" + std::string(1, c) + "\"");
            letters.emplace_back(site, *p);
        }
        try {
            terms.push_back(Term{coeff, PauliString(std::move(letters))});
        } catch (const std::invalid_argument& e) {
            throw ParseError(tw + ".string: " + e.what());
        }
    }
    return LocalOperator(window, std::move(terms));
}

}  // namespace detail

/// Parses a traceless Hermitian window-local operator (observable files use
/// the same schema as model files).
inline LocalOperator parse_observable_json(const nlohmann::json& j, const std::string& where) {
    LocalOperator op = detail::local_operator_from_json(j, where);
    if (op.empty()) throw ParseError(where + ": operator has no terms");
    if (!op.is_traceless()) throw ParseError(where + ": identity term is not allowed");
    if (!op.is_hermitian()) throw ParseError(where + ": coefficients must be real");
    return op;
}

inline Model parse_model_json(const nlohmann::json& j, const std::string& where) {
    Model m;
    if (j.contains("d_loc")) {
        if (!j["d_loc"].is_number_integer())
            throw ParseError(where + ".d_loc: expected an integer");
        m.d_loc = j["d_loc"].get<int>();
        if (m.d_loc != 2)
            throw ParseError(where + ".d_loc: only qubit chains (d_loc = 2) are supported");
    }
    LocalOperator h = parse_observable_json(j, where);
    // Per-term translation does not change H = sum_l T^l h T^{-l}; store the
    // canonical representative (at the declared window) so hashing and the
    // witness construction see a unique form.
    LocalOperator canon = canonicalize(h);
    m.h = LocalOperator(h.window(), std::vector<Term>(canon.terms().begin(), canon.terms().end()));
    return m;
}

inline Model load_model(const std::string& path, bool normalize = false) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
    Model m = parse_model_json(j, path);
    if (normalize) {
        const double norm = window_operator_norm(m.h);
        if (norm <= 0.0) throw ParseError(path + ": operator norm is zero");
        m.h = m.h.scaled(1.0 / norm);
    }
    return m;
}

inline nlohmann::json local_operator_to_json(const LocalOperator& op) {
    nlohmann::json j;
    j["k"] = op.window();
    j["terms"] = nlohmann::json::array();
    for (const auto& t : op.terms()) {
        nlohmann::json jt;
        jt["coeff"] = {t.coeff.real(), t.coeff.imag()};
        jt["string"] = nlohmann::json::object();
        for (const auto& [site, letter] : t.string.letters())
            jt["string"][std::to_string(site)] = std::string(1, to_char(letter));
        j["terms"].push_back(jt);
    }
    return j;
}

inline nlohmann::json model_to_json(const Model& m) {
    nlohmann::json j = local_operator_to_json(m.h);
    j["d_loc"] = m.d_loc;
    return j;
}

/// Stable content hash of a model (canonical serialization, sorted keys).
inline std::string model_hash(const Model& m) {
    return hex64(fnv1a64(model_to_json(m).dump()));
}

inline std::string operator_hash(const LocalOperator& op) {
    return hex64(fnv1a64(local_operator_to_json(op).dump()));
}

/// Parses compact single-string observables such as "X1" or "Z1Z2Z4Z5".
inline PauliString parse_compact_pauli(const std::string& text) {
    PauliString::Letters letters;
    std::size_t i = 0;
    while (i < text.size()) {
        auto p = pauli_from_char(text[i]);
        if (!p)
            throw ParseError("\"" + text + "\": expected X, Y or Z at position " +
                             std::to_string(i));
        ++i;
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i)
            throw ParseError("\"" + text + "\": expected a site number at position " +
                             std::to_string(i));
        letters.emplace_back(std::stoi(text.substr(start, i - start)), *p);
    }
    if (letters.empty()) throw ParseError("\"" + text + "\": empty Pauli string");
    try {
        return PauliString(std::move(letters));
    } catch (const std::invalid_argument& e) {
        throw ParseError("\"" + text + "\": " + e.what());
    }
}

inline LocalOperator single_string_operator(const PauliString& s) {
    return LocalOperator(s.max_site(), {Term{1.0, s}});
}

}  // namespace eevconv
