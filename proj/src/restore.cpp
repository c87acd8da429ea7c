#include "depthsr/restore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace depthsr {

Restorer::Restorer(std::string name, Fn fn, int fallback_factor)
    : name_(std::move(name)), fn_(std::move(fn)), fallback_factor_(fallback_factor) {
    if (fallback_factor_ < 1) throw std::invalid_argument("restorer: factor must be >= 1");
}

DepthMap Restorer::operator()(const DepthMap& lq, const RgbImage& guide) const {
    const int factor = guide.empty() ? fallback_factor_ : guide_factor(lq, guide);
    DepthMap out = fn_(lq, guide, factor);
    if (!out.same_size(lq.width() * factor, lq.height() * factor)) {
        throw std::logic_error("restorer '" + name_ + "' produced wrong output dimensions");
    }
    require_finite(out, name_.c_str());
    return out;
}

int guide_factor(const DepthMap& lq, const RgbImage& guide) {
    if (lq.empty() || guide.width() % lq.width() != 0 || guide.height() % lq.height() != 0) {
        throw std::invalid_argument("guide dimensions are not an integer multiple of the LQ map");
    }
    const int fx = guide.width() / lq.width();
    const int fy = guide.height() / lq.height();
    if (fx != fy) throw std::invalid_argument("guide scale differs between axes");
    return fx;
}

DepthMap restore_bicubic(const DepthMap& lq, int factor) {
    return upscale(lq, factor, ResampleMethod::Bicubic);
}

namespace {

// LQ-grid neighbor window for one HR coordinate along an axis.
struct AxisTaps {
    int first = 0;
    std::vector<double> exponents;  // -(i - u)^2 / (2 sigma^2)
};

std::vector<AxisTaps> axis_taps(int hr_size, int lq_size, int factor, int radius, double sigma) {
    std::vector<AxisTaps> taps(hr_size);
    const double denom = 2.0 * sigma * sigma;
    for (int x = 0; x < hr_size; ++x) {
        const double u = (x + 0.5) / factor - 0.5;
        const int centre = static_cast<int>(std::floor(u + 0.5));
        const int lo = std::max(0, centre - radius);
        const int hi = std::min(lq_size - 1, centre + radius);
        taps[x].first = lo;
        for (int i = lo; i <= hi; ++i) taps[x].exponents.push_back(-(i - u) * (i - u) / denom);
    }
    return taps;
}

}  // namespace

DepthMap jbu(const DepthMap& lq, const RgbImage& guide, const JbuParams& params) {
    if (!(params.sigma_spatial > 0.0) || !(params.sigma_range > 0.0)) {
        throw std::invalid_argument("jbu: sigmas must be > 0");
    }
    const int factor = guide_factor(lq, guide);
    const RgbImage guide_lq = downscale_rgb(guide, factor);
    const int radius = static_cast<int>(std::ceil(2.0 * params.sigma_spatial));
    const auto xt = axis_taps(guide.width(), lq.width(), factor, radius, params.sigma_spatial);
    const auto yt = axis_taps(guide.height(), lq.height(), factor, radius, params.sigma_spatial);
    const double range_denom = 2.0 * params.sigma_range * params.sigma_range;

    DepthMap out(guide.width(), guide.height());
    std::vector<double> exps;
    std::vector<double> vals;
    for (int y = 0; y < guide.height(); ++y) {
        const AxisTaps& ty = yt[y];
        for (int x = 0; x < guide.width(); ++x) {
            const AxisTaps& tx = xt[x];
            const double r = guide.at(x, y, 0), g = guide.at(x, y, 1), b = guide.at(x, y, 2);
            exps.clear();
            vals.clear();
            for (std::size_t jj = 0; jj < ty.exponents.size(); ++jj) {
                const int j = ty.first + static_cast<int>(jj);
                for (std::size_t ii = 0; ii < tx.exponents.size(); ++ii) {
                    const int i = tx.first + static_cast<int>(ii);
                    const double dr = r - guide_lq.at(i, j, 0);
                    const double dg = g - guide_lq.at(i, j, 1);
                    const double db = b - guide_lq.at(i, j, 2);
                    exps.push_back(tx.exponents[ii] + ty.exponents[jj] -
                                   (dr * dr + dg * dg + db * db) / range_denom);
                    vals.push_back(lq.at(i, j));
                }
            }
            double wsum = 0.0, acc = 0.0;
            for (std::size_t k = 0; k < exps.size(); ++k) {
                const double w = std::exp(exps[k]);
                wsum += w;
                acc += w * vals[k];
            }
            if (!(wsum > 0.0)) {
                // every weight underflowed; renormalize against the largest exponent
                const double top = *std::max_element(exps.begin(), exps.end());
                wsum = acc = 0.0;
                for (std::size_t k = 0; k < exps.size(); ++k) {
                    const double w = std::exp(exps[k] - top);
                    wsum += w;
                    acc += w * vals[k];
                }
            }
            out.at(x, y) = acc / wsum;
        }
    }
    return out;
}

Grid<double, 1> box_mean(const Grid<double, 1>& src, int radius) {
    const int w = src.width();
    const int h = src.height();
    // integral image with a zero first row and column
    std::vector<double> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    auto S = [&](int x, int y) -> double& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += src.at(x, y);
            S(x + 1, y + 1) = S(x + 1, y) + row;
        }
    }
    Grid<double, 1> out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius), y1 = std::min(h, y + radius + 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius), x1 = std::min(w, x + radius + 1);
            const double sum = S(x1, y1) - S(x0, y1) - S(x1, y0) + S(x0, y0);
            out.at(x, y) = sum / static_cast<double>((x1 - x0) * (y1 - y0));
        }
    }
    return out;
}

DepthMap guided_filter_upsample(const DepthMap& lq, const RgbImage& guide,
                                const GuidedFilterParams& params) {
    if (params.radius < 1) throw std::invalid_argument("guided filter: radius must be >= 1");
    if (!(params.eps > 0.0)) throw std::invalid_argument("guided filter: eps must be > 0");
    const int factor = guide_factor(lq, guide);
    const DepthMap p = upscale(lq, factor, ResampleMethod::Bicubic);
    const Grid<double, 1> I = luminance(guide);
    const int r = params.radius;

    Grid<double, 1> Ip(I.width(), I.height()), II(I.width(), I.height());
    for (std::size_t k = 0; k < I.pixel_count(); ++k) {
        Ip.storage()[k] = I.storage()[k] * p.storage()[k];
        II.storage()[k] = I.storage()[k] * I.storage()[k];
    }
    const auto mean_I = box_mean(I, r);
    const auto mean_p = box_mean(p, r);
    const auto mean_Ip = box_mean(Ip, r);
    const auto mean_II = box_mean(II, r);

    Grid<double, 1> a(I.width(), I.height()), b(I.width(), I.height());
    for (std::size_t k = 0; k < I.pixel_count(); ++k) {
        const double mi = mean_I.storage()[k];
        const double mp = mean_p.storage()[k];
        const double var = std::max(0.0, mean_II.storage()[k] - mi * mi);
        const double cov = mean_Ip.storage()[k] - mi * mp;
        a.storage()[k] = cov / (var + params.eps);
        b.storage()[k] = mp - a.storage()[k] * mi;
    }
    const auto mean_a = box_mean(a, r);
    const auto mean_b = box_mean(b, r);
    DepthMap out(I.width(), I.height());
    for (std::size_t k = 0; k < I.pixel_count(); ++k) {
        out.storage()[k] = mean_a.storage()[k] * I.storage()[k] + mean_b.storage()[k];
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty sequence");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

LineFit fit_theil_sen(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("theil-sen: xs and ys differ in length");
    if (xs.size() < 2) throw std::invalid_argument("theil-sen: need at least 2 points");
    std::vector<double> slopes;
    slopes.reserve(xs.size() * (xs.size() - 1) / 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            if (xs[j] != xs[i]) slopes.push_back((ys[j] - ys[i]) / (xs[j] - xs[i]));
        }
    }
    if (slopes.empty()) throw DegenerateFitError("theil-sen: all x values are equal");
    LineFit fit;
    fit.slope = median(std::move(slopes));
    std::vector<double> residuals(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) residuals[i] = ys[i] - fit.slope * xs[i];
    fit.intercept = median(std::move(residuals));
    return fit;
}

namespace {

ScaleOffset solve_lsq(std::span<const double> p, std::span<const double> y) {
    const double n = static_cast<double>(p.size());
    if (p.size() < 2) throw DegenerateFitError("scale/offset fit: need at least 2 pixels");
    const double mp = std::accumulate(p.begin(), p.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sxx += (p[i] - mp) * (p[i] - mp);
        sxy += (p[i] - mp) * (y[i] - my);
    }
    if (!(sxx / n > 1e-20 * std::max(1.0, mp * mp))) {
        throw DegenerateFitError("scale/offset fit: prediction is constant over the mask (mean " +
                                 std::to_string(mp) + ")");
    }
    const double s = sxy / sxx;
    return {s, my - s * mp};
}

}  // namespace

ScaleOffset fit_scale_offset_lsq(const DepthMap& pred, const DepthMap& target,
                                 const PixelMask& mask, bool robust) {
    if (!pred.same_size(target) || !pred.same_size(mask)) {
        throw std::invalid_argument("scale/offset fit: dimension mismatch");
    }
    std::vector<double> p, y;
    for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
        if (!mask.storage()[i]) continue;
        p.push_back(pred.storage()[i]);
        y.push_back(target.storage()[i]);
    }
    ScaleOffset fit = solve_lsq(p, y);
    if (!robust) return fit;

    const std::size_t drop = (p.size() * 5 + 99) / 100;
    if (drop == 0) return fit;
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto residual = [&](std::size_t i) { return std::abs(fit.s * p[i] + fit.t - y[i]); };
    // stable ordering keeps ties deterministic
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return residual(a) < residual(b); });
    order.resize(order.size() - drop);
    std::sort(order.begin(), order.end());
    std::vector<double> kp, ky;
    for (std::size_t i : order) {
        kp.push_back(p[i]);
        ky.push_back(y[i]);
    }
    return solve_lsq(kp, ky);
}

DepthMap align_prediction(const DepthMap& pred_hr, const DepthMap& lq, const AlignParams& params) {
    if (!pred_hr.same_size(lq.width() * params.factor, lq.height() * params.factor)) {
        throw std::invalid_argument("align: prediction must be " + std::to_string(params.factor) +
                                    "x the LQ dimensions");
    }
    const DepthMap pred_lr = downscale(pred_hr, params.factor, ResampleMethod::BlockMean);
    DepthMap target = lq;
    for (double& v : target.storage()) v *= params.global_scale;
    const ScaleOffset st =
        fit_scale_offset_lsq(pred_lr, target, full_mask(lq.width(), lq.height()), params.robust);
    DepthMap out = pred_hr;
    for (double& v : out.storage()) v = st.s * v + st.t;
    return out;
}

DepthMap clip_depth(const DepthMap& depth, const ClipRange& range) {
    if (!(range.lo < range.hi)) throw std::invalid_argument("clip: require lo < hi");
    DepthMap out = depth;
    for (double& v : out.storage()) v = std::clamp(v, range.lo, range.hi);
    return out;
}

DepthMap threshold_background(const DepthMap& depth, double threshold) {
    DepthMap out = depth;
    for (double& v : out.storage()) v = std::min(v, threshold);
    return out;
}

Normalized minmax_normalize(const DepthMap& depth) {
    const auto [lo, hi] = min_max(depth);
    if (!(hi > lo)) throw std::invalid_argument("minmax normalize: constant map");
    Normalized n{depth, lo, hi};
    const double span = hi - lo;
    for (double& v : n.depth.storage()) v = (v - lo) / span;
    return n;
}

DepthMap minmax_denormalize(const Normalized& normalized) {
    DepthMap out = normalized.depth;
    const double span = normalized.max - normalized.min;
    for (double& v : out.storage()) v = normalized.min + v * span;
    return out;
}

DepthMap flip_ensemble(const Restorer& restorer, const DepthMap& lq, const RgbImage& guide) {
    DepthMap a = restorer(lq, guide);
    const DepthMap b = flip_horizontal(restorer(flip_horizontal(lq), flip_horizontal(guide)));
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        a.storage()[i] = 0.5 * (a.storage()[i] + b.storage()[i]);
    }
    return a;
}

}  // namespace depthsr
