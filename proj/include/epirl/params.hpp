#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "epirl/errors.hpp"

namespace epirl {

/// Epidemic parameters shared by the ODE and ABM backends.
struct EpidemicParams {
    double beta = 0.2;                 // effective contact rate per day
    double gamma = 0.1;                // mean recovery rate per day
    std::int64_t population = 500;     // total individuals N
    std::int64_t initial_infected = 5; // I(0)

    double r0() const { return beta / gamma; }

    void validate() const {
        if (!std::isfinite(beta) || beta < 0.0)
            throw InvalidParams("beta must be finite and >= 0, got " + std::to_string(beta));
        if (!std::isfinite(gamma) || gamma <= 0.0 || gamma > 1.0)
            throw InvalidParams("gamma must be in (0, 1], got " + std::to_string(gamma));
        if (population < 1)
            throw InvalidParams("population must be >= 1, got " + std::to_string(population));
        if (initial_infected < 1 || initial_infected > population)
            throw InvalidParams("initial_infected must be in [1, population], got " +
                                std::to_string(initial_infected));
    }

    bool operator==(const EpidemicParams&) const = default;
};

inline void to_json(nlohmann::json& j, const EpidemicParams& p) {
    j = nlohmann::json{{"beta", p.beta},
                       {"gamma", p.gamma},
                       {"population", p.population},
                       {"initial_infected", p.initial_infected}};
}

inline void from_json(const nlohmann::json& j, EpidemicParams& p) {
    j.at("beta").get_to(p.beta);
    j.at("gamma").get_to(p.gamma);
    j.at("population").get_to(p.population);
    j.at("initial_infected").get_to(p.initial_infected);
}

} // namespace epirl
