#pragma once

#include "rcbounds/common.hpp"

#include <json.hpp>

#include <initializer_list>
#include <set>
#include <string>

namespace rcb {

using json = nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    require(j.is_object(), where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        require(ok.count(it.key()) > 0, where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
}

template <class T>
T get_req(const json& j, const char* key, const std::string& where) {
    require(j.contains(key), where + ": missing key '" + key + "'");
    return get_or<T>(j, key, T{});
}

inline Mat mat_from_json(const json& j, const std::string& where) {
    require(j.is_array(), where + ": matrix must be an array of rows");
    if (j.empty()) return Mat(0, 0);
    Eigen::Index r = Eigen::Index(j.size());
    Eigen::Index c = j[0].is_array() ? Eigen::Index(j[0].size()) : 1;
    Mat M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = j[std::size_t(i)];
        if (!row.is_array()) {
            require(c == 1 && row.is_number(), where + ": ragged matrix");
            M(i, 0) = row.get<double>();
            continue;
        }
        require(Eigen::Index(row.size()) == c, where + ": ragged matrix");
        for (Eigen::Index k = 0; k < c; ++k) {
            require(row[std::size_t(k)].is_number(), where + ": non-numeric entry");
            M(i, k) = row[std::size_t(k)].get<double>();
        }
    }
    return M;
}

inline Vec vec_from_json(const json& j, const std::string& where) {
    require(j.is_array(), where + ": vector must be an array");
    Vec v(Eigen::Index(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        require(j[i].is_number(), where + ": non-numeric entry");
        v(Eigen::Index(i)) = j[i].get<double>();
    }
    return v;
}

inline json mat_to_json(const Mat& M) {
    json out = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        out.push_back(row);
    }
    return out;
}

inline json vec_to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

// Doubles are written with shortest round-trip digits; non-finite values
// become strings so the output stays valid JSON.
inline json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline double num_from(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ConfigError(where + ": expected a number");
}

} // namespace rcb
