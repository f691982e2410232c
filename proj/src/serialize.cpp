#include "spectral_plane/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "spectral_plane/errors.hpp"

namespace spectral_plane {

std::string format_double(double value) {
    char buffer[64];
    const auto result =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

namespace {

void append_doubles(std::string& out, const std::vector<double>& values) {
    out += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
}

} // namespace

std::string candidates_to_json(const std::vector<Candidate>& candidates) {
    std::string out = "{\"candidates\":[";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        if (i) out += ',';
        out += "{\"theta\":";
        append_doubles(out, c.theta);
        out += ",\"t\":";
        append_doubles(out, c.t);
        out += ",\"pivots\":[" + std::to_string(c.plane.pivots[0]) + ',' +
               std::to_string(c.plane.pivots[1]) + "],\"Gq\":[";
        for (int r = 0; r < 2; ++r) {
            if (r) out += ',';
            out += '[';
            for (std::size_t k = 0; k < c.plane.coefficients[r].size(); ++k) {
                if (k) out += ',';
                const Rational& q = c.plane.coefficients[r][k];
                out += '[' + std::to_string(q.num()) + ',' + std::to_string(q.den()) + ']';
            }
            out += ']';
        }
        out += "],\"qmax\":" + std::to_string(c.plane.qmax);
        out += ",\"residual\":" + format_double(c.residual);
        out += ",\"model\":\"" + to_string(c.model) + "\"}";
    }
    out += "]}";
    return out;
}

std::vector<Candidate> candidates_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    std::vector<Candidate> out;
    for (const auto& item : doc.at("candidates")) {
        Candidate c;
        c.theta = item.at("theta").get<std::vector<double>>();
        c.t = item.at("t").get<std::vector<double>>();
        const auto pivots = item.at("pivots");
        c.plane.pivots = {pivots.at(0).get<int>(), pivots.at(1).get<int>()};
        const auto gq = item.at("Gq");
        for (int r = 0; r < 2; ++r)
            for (const auto& pair : gq.at(r))
                c.plane.coefficients[r].emplace_back(pair.at(0).get<long long>(),
                                                     pair.at(1).get<long long>());
        c.plane.qmax = item.value("qmax", 0LL);
        c.residual = item.at("residual").get<double>();
        const std::string model = item.at("model").get<std::string>();
        if (model == "exact-elliptic") {
            c.model = SearchModel::exact_elliptic;
        } else if (model == "linearized") {
            c.model = SearchModel::linearized;
        } else {
            throw Error("unknown candidate model: " + model);
        }
        out.push_back(std::move(c));
    }
    return out;
}

RawConfig raw_config_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    RawConfig raw;
    for (const auto& [key, value] : doc.items()) {
        if (key == "g") {
            raw.g = value.get<int>();
        } else if (key == "theta") {
            raw.theta = value.get<std::vector<double>>();
        } else if (key == "t") {
            raw.t = value.get<std::vector<double>>();
        } else if (key == "t_max") {
            raw.t_max = value.get<double>();
        } else if (key == "gap_margin") {
            raw.gap_margin = value.get<double>();
        } else {
            throw Error("unknown configuration field: " + key);
        }
    }
    return raw;
}

} // namespace spectral_plane
