#include "depthsr/chain.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace depthsr {

namespace {

enum class StageKind { Restorer, Post, Flip };

struct StageSchema {
    std::string_view name;
    StageKind kind;
    std::vector<std::pair<std::string_view, std::string_view>> params;  // name, default
};

const std::vector<StageSchema>& schemas() {
    static const std::vector<StageSchema> table = {
        {"bicubic", StageKind::Restorer, {{"factor", "8"}}},
        {"bilinear", StageKind::Restorer, {{"factor", "8"}}},
        {"nearest", StageKind::Restorer, {{"factor", "8"}}},
        {"jbu", StageKind::Restorer, {{"sigma_spatial", "2"}, {"sigma_range", "0.1"}, {"factor", "8"}}},
        {"guided", StageKind::Restorer, {{"radius", "4"}, {"eps", "0.001"}, {"factor", "8"}}},
        {"clip", StageKind::Post, {{"lo", "0.1"}, {"hi", "20"}}},
        {"threshold", StageKind::Post, {{"value", "25"}}},
        {"align", StageKind::Post, {{"scale", "16"}, {"robust", "0"}}},
        {"normalize", StageKind::Post, {}},
        {"flip", StageKind::Flip, {}},
    };
    return table;
}

const StageSchema& schema_for(std::string_view name) {
    for (const auto& s : schemas()) {
        if (s.name == name) return s;
    }
    throw std::invalid_argument("unknown chain stage '" + std::string(name) + "'");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double to_double(const StageSpec& stage, std::string_view key) {
    for (const auto& [k, v] : stage.args) {
        if (k != key) continue;
        double out = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
            throw std::invalid_argument(stage.name + ": '" + v + "' is not a number for " + k);
        }
        return out;
    }
    throw std::logic_error("missing parameter " + std::string(key));
}

int to_int(const StageSpec& stage, std::string_view key) {
    const double v = to_double(stage, key);
    if (v != static_cast<double>(static_cast<int>(v))) {
        throw std::invalid_argument(stage.name + ": " + std::string(key) + " must be an integer");
    }
    return static_cast<int>(v);
}

Restorer::Fn base_fn(const StageSpec& stage) {
    const auto& n = stage.name;
    if (n == "bicubic" || n == "bilinear" || n == "nearest") {
        const ResampleMethod method = parse_resample_method(n);
        return [method](const DepthMap& lq, const RgbImage&, int factor) {
            return upscale(lq, factor, method);
        };
    }
    if (n == "jbu") {
        const JbuParams p{to_double(stage, "sigma_spatial"), to_double(stage, "sigma_range")};
        if (!(p.sigma_spatial > 0.0) || !(p.sigma_range > 0.0)) {
            throw std::invalid_argument("jbu: sigmas must be > 0");
        }
        return [p](const DepthMap& lq, const RgbImage& guide, int) {
            if (guide.empty()) throw std::invalid_argument("jbu: an RGB guide is required");
            return jbu(lq, guide, p);
        };
    }
    if (n == "guided") {
        const GuidedFilterParams p{to_int(stage, "radius"), to_double(stage, "eps")};
        if (p.radius < 1 || !(p.eps > 0.0)) throw std::invalid_argument("guided: need radius >= 1, eps > 0");
        return [p](const DepthMap& lq, const RgbImage& guide, int) {
            if (guide.empty()) throw std::invalid_argument("guided: an RGB guide is required");
            return guided_filter_upsample(lq, guide, p);
        };
    }
    throw std::invalid_argument("'" + n + "' is not a restorer");
}

using PostFn = std::function<DepthMap(DepthMap hr, const DepthMap& lq, int factor)>;

PostFn post_fn(const StageSpec& stage) {
    const auto& n = stage.name;
    if (n == "clip") {
        const ClipRange range{to_double(stage, "lo"), to_double(stage, "hi")};
        if (!(range.lo < range.hi)) throw std::invalid_argument("clip: require lo < hi");
        return [range](DepthMap hr, const DepthMap&, int) { return clip_depth(hr, range); };
    }
    if (n == "threshold") {
        const double value = to_double(stage, "value");
        return [value](DepthMap hr, const DepthMap&, int) { return threshold_background(hr, value); };
    }
    if (n == "align") {
        const double scale = to_double(stage, "scale");
        const bool robust = to_int(stage, "robust") != 0;
        return [scale, robust](DepthMap hr, const DepthMap& lq, int factor) {
            return align_prediction(hr, lq, AlignParams{scale, factor, robust});
        };
    }
    if (n == "normalize") {
        return [](DepthMap hr, const DepthMap&, int) { return minmax_normalize(hr).depth; };
    }
    throw std::invalid_argument("'" + n + "' is not a post-processing stage");
}

}  // namespace

ChainSpec parse_chain(std::string_view text) {
    ChainSpec chain;
    if (trim(text).empty()) throw std::invalid_argument("empty restorer chain");
    for (std::string_view segment : split(text, '|')) {
        segment = trim(segment);
        const std::size_t colon = segment.find(':');
        const std::string_view name = trim(segment.substr(0, colon));
        const StageSchema& schema = schema_for(name);
        if (chain.stages.empty() && schema.kind != StageKind::Restorer) {
            throw std::invalid_argument("chain must start with a restorer, got '" + std::string(name) + "'");
        }
        if (!chain.stages.empty() && schema.kind == StageKind::Restorer) {
            throw std::invalid_argument("restorer '" + std::string(name) + "' may only appear first");
        }
        StageSpec stage{std::string(name), {}};
        std::vector<std::string> values(schema.params.size());
        std::vector<bool> given(schema.params.size(), false);
        if (colon != std::string_view::npos) {
            const std::string_view arglist = trim(segment.substr(colon + 1));
            std::size_t position = 0;
            bool named_seen = false;
            for (std::string_view arg : split(arglist, ',')) {
                arg = trim(arg);
                if (arg.empty()) throw std::invalid_argument(stage.name + ": empty argument");
                std::size_t slot = 0;
                std::string_view value = arg;
                const std::size_t eq = arg.find('=');
                if (eq != std::string_view::npos) {
                    named_seen = true;
                    const std::string_view key = trim(arg.substr(0, eq));
                    value = trim(arg.substr(eq + 1));
                    auto it = std::find_if(schema.params.begin(), schema.params.end(),
                                           [&](const auto& p) { return p.first == key; });
                    if (it == schema.params.end()) {
                        throw std::invalid_argument(stage.name + ": unknown parameter '" +
                                                    std::string(key) + "'");
                    }
                    slot = static_cast<std::size_t>(it - schema.params.begin());
                } else {
                    if (named_seen) {
                        throw std::invalid_argument(stage.name + ": positional argument after named one");
                    }
                    slot = position++;
                    if (slot >= schema.params.size()) {
                        throw std::invalid_argument(stage.name + ": too many arguments");
                    }
                }
                if (given[slot]) {
                    throw std::invalid_argument(stage.name + ": parameter '" +
                                                std::string(schema.params[slot].first) + "' given twice");
                }
                if (value.empty()) throw std::invalid_argument(stage.name + ": empty value");
                given[slot] = true;
                values[slot] = std::string(value);
            }
        }
        for (std::size_t i = 0; i < schema.params.size(); ++i) {
            stage.args.emplace_back(std::string(schema.params[i].first),
                                    given[i] ? values[i] : std::string(schema.params[i].second));
        }
        chain.stages.push_back(std::move(stage));
    }
    return chain;
}

std::string format_chain(const ChainSpec& chain) {
    std::string out;
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        if (i) out += '|';
        out += chain.stages[i].name;
        for (std::size_t k = 0; k < chain.stages[i].args.size(); ++k) {
            out += k ? ',' : ':';
            out += chain.stages[i].args[k].first + '=' + chain.stages[i].args[k].second;
        }
    }
    return out;
}

std::vector<std::string> restorer_names() {
    std::vector<std::string> names;
    for (const auto& s : schemas()) {
        if (s.kind == StageKind::Restorer) names.emplace_back(s.name);
    }
    return names;
}

Restorer build_restorer(const ChainSpec& chain) {
    if (chain.stages.empty()) throw std::invalid_argument("empty restorer chain");
    const StageSpec& first = chain.stages.front();
    const int factor = to_int(first, "factor");
    if (factor < 1) throw std::invalid_argument("factor must be >= 1");
    Restorer::Fn fn = base_fn(first);
    for (std::size_t i = 1; i < chain.stages.size(); ++i) {
        const StageSpec& stage = chain.stages[i];
        if (schema_for(stage.name).kind == StageKind::Flip) {
            fn = [inner = fn](const DepthMap& lq, const RgbImage& guide, int f) {
                return flip_ensemble(Restorer("flip-inner", inner, f), lq, guide);
            };
        } else {
            fn = [inner = fn, post = post_fn(stage)](const DepthMap& lq, const RgbImage& guide, int f) {
                return post(inner(lq, guide, f), lq, f);
            };
        }
    }
    return Restorer(format_chain(chain), std::move(fn), factor);
}

}  // namespace depthsr
