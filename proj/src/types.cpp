#include "retailopt/types.hpp"

#include <string>

namespace retailopt {

namespace {

bool inside_any_obstacle(const DomainPoint& p, const Environment& env) {
    for (const auto& r : env.obstacles) {
        if (r.contains_interior(p.x, p.y)) return true;
    }
    return false;
}

}  // namespace

std::vector<std::string> validate_session(const Session& session) {
    std::vector<std::string> v;
    const auto& env = session.environment;

    if (!(env.scale_m > 0.0)) v.push_back("environment.scale_m must be > 0");
    for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
        if (!env.obstacles[i].well_formed())
            v.push_back("obstacle " + std::to_string(i) +
                        ": min_corner must be componentwise below max_corner and both in [0,1]^2");
    }

    const auto T = session.relative.length();
    if (T < 2) v.push_back("relative trajectory must have length >= 2");
    if (!(session.relative.dt > 0.0)) v.push_back("relative.dt must be > 0");
    for (std::size_t t = 0; t < T; ++t) {
        if (!session.relative.points[t].finite()) {
            v.push_back("relative point " + std::to_string(t + 1) + " is not finite");
            break;
        }
    }

    for (std::size_t j = 0; j < session.anchors_tu.size(); ++j) {
        const auto& a = session.anchors_tu[j];
        if (!a.location.valid())
            v.push_back("anchor_tu " + std::to_string(j) + " outside domain");
        else if (inside_any_obstacle(a.location, env))
            v.push_back("anchor_tu " + std::to_string(j) + " inside obstacle interior");
    }

    int prev_t = 0;
    for (std::size_t k = 0; k < session.anchors_tk.size(); ++k) {
        const auto& a = session.anchors_tk[k];
        if (!a.location.valid())
            v.push_back("anchor_tk " + std::to_string(k) + " outside domain");
        else if (inside_any_obstacle(a.location, env))
            v.push_back("anchor_tk " + std::to_string(k) + " inside obstacle interior");
        if (a.timestep < 1 || a.timestep > static_cast<int>(T))
            v.push_back("anchor_tk " + std::to_string(k) + " timestep outside [1, T]");
        if (k > 0 && a.timestep <= prev_t)
            v.push_back("anchor_tk timesteps must be strictly increasing");
        prev_t = a.timestep;
    }

    if (session.ground_truth) {
        const auto& gt = *session.ground_truth;
        if (gt.length() != T) v.push_back("ground_truth length mismatch");
        for (std::size_t t = 0; t < gt.length(); ++t) {
            if (!gt.points[t].valid()) {
                v.push_back("ground_truth point " + std::to_string(t + 1) + " outside domain");
                break;
            }
        }
    }

    return v;
}

}  // namespace retailopt
