#include "depthsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace depthsr {

void SilogParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("silog: lambda must be in [0, 1]");
    if (!(alpha > 0.0)) throw std::invalid_argument("silog: alpha must be > 0");
}

namespace {

void check_inputs(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask) {
    if (!pred.same_size(gt) || !pred.same_size(mask)) {
        throw std::invalid_argument("metrics: dimension mismatch (" + std::to_string(pred.width()) +
                                    "x" + std::to_string(pred.height()) + " vs " +
                                    std::to_string(gt.width()) + "x" +
                                    std::to_string(gt.height()) + ")");
    }
}

std::size_t require_nonempty(std::size_t count) {
    if (count == 0) throw std::invalid_argument("metrics: empty mask");
    return count;
}

struct LogSums {
    double sum = 0.0;
    double sq_sum = 0.0;
    std::size_t count = 0;
};

LogSums log_sums(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask) {
    check_inputs(pred, gt, mask);
    LogSums s;
    for (int y = 0; y < gt.height(); ++y) {
        for (int x = 0; x < gt.width(); ++x) {
            if (!mask.at(x, y)) continue;
            const double p = pred.at(x, y);
            const double g = gt.at(x, y);
            if (!(p > 0.0) || !(g > 0.0)) {
                throw std::invalid_argument("silog: non-positive depth at (" + std::to_string(x) +
                                            ", " + std::to_string(y) + ")");
            }
            const double d = std::log(p) - std::log(g);
            s.sum += d;
            s.sq_sum += d * d;
            ++s.count;
        }
    }
    require_nonempty(s.count);
    return s;
}

}  // namespace

ErrorSums error_sums(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask) {
    check_inputs(pred, gt, mask);
    ErrorSums s;
    auto p = pred.values();
    auto g = gt.values();
    auto m = mask.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!m[i]) continue;
        const double e = p[i] - g[i];
        s.abs_sum += std::abs(e);
        s.sq_sum += e * e;
        ++s.count;
    }
    return s;
}

double mae(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask) {
    const auto s = error_sums(pred, gt, mask);
    return s.abs_sum / static_cast<double>(require_nonempty(s.count));
}

double mae(const DepthMap& pred, const DepthMap& gt) {
    return mae(pred, gt, full_mask(gt.width(), gt.height()));
}

double rmse(const DepthMap& pred, const DepthMap& gt, const PixelMask& mask) {
    const auto s = error_sums(pred, gt, mask);
    return std::sqrt(s.sq_sum / static_cast<double>(require_nonempty(s.count)));
}

double rmse(const DepthMap& pred, const DepthMap& gt) {
    return rmse(pred, gt, full_mask(gt.width(), gt.height()));
}

double silog(const DepthMap& pred, const DepthMap& gt, double lambda, const PixelMask& mask) {
    SilogParams{lambda, 1.0}.validate();
    const auto s = log_sums(pred, gt, mask);
    const double n = static_cast<double>(s.count);
    return s.sq_sum / n - lambda / (n * n) * s.sum * s.sum;
}

double silog(const DepthMap& pred, const DepthMap& gt, double lambda) {
    return silog(pred, gt, lambda, full_mask(gt.width(), gt.height()));
}

double silog_scaled(const DepthMap& pred, const DepthMap& gt, const SilogParams& params,
                    const PixelMask& mask) {
    params.validate();
    return params.alpha * std::sqrt(std::max(0.0, silog(pred, gt, params.lambda, mask)));
}

double silog_scaled(const DepthMap& pred, const DepthMap& gt, const SilogParams& params) {
    return silog_scaled(pred, gt, params, full_mask(gt.width(), gt.height()));
}

PixelMask make_eval_mask(const DepthMap& gt, const EvalOptions& options) {
    PixelMask mask = full_mask(gt.width(), gt.height());
    if (options.mask_max_depth) {
        auto g = gt.values();
        auto m = mask.values();
        for (std::size_t i = 0; i < g.size(); ++i) m[i] = g[i] <= *options.mask_max_depth;
    }
    return mask;
}

ImageMetrics evaluate_image(const std::string& id, const DepthMap& pred, const DepthMap& gt,
                            const EvalOptions& options, ErrorSums* sums) {
    const PixelMask mask = make_eval_mask(gt, options);
    const ErrorSums s = error_sums(pred, gt, mask);
    if (s.count == 0) throw std::invalid_argument("metrics: empty mask for '" + id + "'");
    ImageMetrics m;
    m.id = id;
    m.mae = s.abs_sum / static_cast<double>(s.count);
    m.rmse = std::sqrt(s.sq_sum / static_cast<double>(s.count));
    try {
        m.silog = silog_scaled(pred, gt, options.silog, mask);
    } catch (const std::invalid_argument&) {
        m.silog.reset();
    }
    if (sums) *sums = s;
    return m;
}

MetricsReport assemble_report(std::vector<ImageMetrics> images, const EvalOptions& options,
                              const std::vector<ErrorSums>& sums) {
    if (images.empty()) throw std::invalid_argument("metrics: no images to report");
    if (options.pooled && sums.size() != images.size()) {
        throw std::invalid_argument("metrics: pooled aggregation needs per-image sums");
    }
    std::vector<std::size_t> order(images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return images[a].id < images[b].id; });

    MetricsReport report;
    report.pooled = options.pooled;
    ErrorSums total;
    double silog_sum = 0.0;
    std::size_t silog_n = 0;
    for (std::size_t k : order) {
        const ImageMetrics& m = images[k];
        report.mae += m.mae;
        report.rmse += m.rmse;
        if (m.silog) {
            silog_sum += *m.silog;
            ++silog_n;
        }
        if (!sums.empty()) {
            total.abs_sum += sums[k].abs_sum;
            total.sq_sum += sums[k].sq_sum;
            total.count += sums[k].count;
        }
        report.images.push_back(m);
    }
    const double n = static_cast<double>(images.size());
    report.mae /= n;
    report.rmse /= n;
    report.pixel_count = total.count;
    if (options.pooled) {
        report.mae = total.abs_sum / static_cast<double>(total.count);
        report.rmse = std::sqrt(total.sq_sum / static_cast<double>(total.count));
    }
    if (silog_n > 0) report.silog = silog_sum / static_cast<double>(silog_n);
    return report;
}

namespace {

std::string fmt_number(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

namespace {

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

}  // namespace

std::string report_csv(const MetricsReport& report) {
    std::string out = "id,mae,rmse,silog\n";
    for (const auto& m : report.images) {
        out += csv_field(m.id);
        out += ',' + fmt_number(m.mae, "%.17g");
        out += ',' + fmt_number(m.rmse, "%.17g");
        out += ',';
        if (m.silog) out += fmt_number(*m.silog, "%.17g");
        out += '\n';
    }
    return out;
}

std::string report_table(const MetricsReport& report, const std::string& title) {
    std::size_t id_width = 5;
    for (const auto& m : report.images) id_width = std::max(id_width, m.id.size());
    auto row = [&](const std::string& id, double mae_v, double rmse_v, std::optional<double> s) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-*s  %10.4f  %10.4f  %10s\n", static_cast<int>(id_width),
                      id.c_str(), mae_v, rmse_v, s ? fmt_number(*s, "%.4f").c_str() : "-");
        return std::string(buf);
    };
    std::string out;
    if (!title.empty()) out += title + "\n";
    char head[256];
    std::snprintf(head, sizeof head, "%-*s  %10s  %10s  %10s\n", static_cast<int>(id_width), "Image",
                  "MAE", "RMSE", "SILog");
    out += head;
    out += std::string(id_width + 36, '-') + "\n";
    for (const auto& m : report.images) out += row(m.id, m.mae, m.rmse, m.silog);
    out += std::string(id_width + 36, '-') + "\n";
    out += row(report.pooled ? "pooled" : "mean", report.mae, report.rmse, report.silog);
    return out;
}

}  // namespace depthsr
