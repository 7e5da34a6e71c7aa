// Command-line front end for the RoI Tanh-polar transform library.
//
// Exit codes: 0 ok, 2 I/O failure, 3 invalid bbox, 4 shape mismatch,
// 5 usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rtwarp/checks.hpp"
#include "rtwarp/geometry.hpp"
#include "rtwarp/image_io.hpp"
#include "rtwarp/metrics.hpp"
#include "rtwarp/nn.hpp"
#include "rtwarp/tensor_io.hpp"
#include "rtwarp/warp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitBBox = 3;
constexpr int kExitShape = 4;
constexpr int kExitUsage = 5;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BBoxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PaletteEntry {
    uint8_t r = 0, g = 0, b = 0;
};

struct Config {
    int height = 512;
    int width = 512;
    rtwarp::warp::BorderPolicy border = rtwarp::warp::BorderPolicy::Zero;
    double lambda = 0.5;
    rtwarp::warp::AugmentParams augment;
    std::vector<PaletteEntry> palette;  // index -> overlay color
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("cannot parse " + what + ": '" + s + "'");
    }
    if (pos != s.size()) throw UsageError("trailing junk in " + what + ": '" + s + "'");
    return v;
}

std::pair<int, int> parse_size(const std::string& s) {
    const auto parts = split(s, 'x');
    if (parts.size() != 2) throw UsageError("size must be HxW, got '" + s + "'");
    const int h = static_cast<int>(parse_double(parts[0], "size height"));
    const int w = static_cast<int>(parse_double(parts[1], "size width"));
    if (h < 2 || w < 2) throw UsageError("size dims must be >= 2");
    return {h, w};
}

rtwarp::geometry::BBox parse_bbox_string(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 4) {
        throw BBoxError("bbox must be x,y,w,h, got '" + s + "'");
    }
    rtwarp::geometry::BBox b;
    try {
        b.x = parse_double(parts[0], "bbox x");
        b.y = parse_double(parts[1], "bbox y");
        b.w = parse_double(parts[2], "bbox w");
        b.h = parse_double(parts[3], "bbox h");
    } catch (const UsageError& e) {
        throw BBoxError(e.what());
    }
    if (b.w <= 0.0) throw BBoxError("bbox field w must be positive, got " + parts[2]);
    if (b.h <= 0.0) throw BBoxError("bbox field h must be positive, got " + parts[3]);
    return b;
}

rtwarp::geometry::BBox load_bbox(const std::string& bbox_arg,
                                 const std::string& bbox_file) {
    if (!bbox_arg.empty()) return parse_bbox_string(bbox_arg);
    if (!bbox_file.empty()) {
        std::ifstream is(bbox_file);
        if (!is) throw rtwarp::io::IoError("cannot open bbox file " + bbox_file);
        std::string line;
        std::getline(is, line);
        return parse_bbox_string(line);
    }
    throw BBoxError("a bounding box is required (--bbox or --bbox-file)");
}

void apply_config_entry(Config& cfg, const std::string& key, const std::string& value) {
    if (key == "size") {
        std::tie(cfg.height, cfg.width) = parse_size(value);
    } else if (key == "border") {
        if (value == "zero") {
            cfg.border = rtwarp::warp::BorderPolicy::Zero;
        } else if (value == "replicate") {
            cfg.border = rtwarp::warp::BorderPolicy::Replicate;
        } else {
            throw UsageError("border must be zero or replicate, got '" + value + "'");
        }
    } else if (key == "lambda") {
        cfg.lambda = parse_double(value, "lambda");
        if (cfg.lambda < 0.0 || cfg.lambda > 1.0) {
            throw UsageError("lambda must be in [0, 1]");
        }
    } else if (key == "max_shift_frac") {
        cfg.augment.max_shift_frac = parse_double(value, "max_shift_frac");
    } else if (key == "scale_lo") {
        cfg.augment.scale_lo = parse_double(value, "scale_lo");
    } else if (key == "scale_hi") {
        cfg.augment.scale_hi = parse_double(value, "scale_hi");
    } else if (key == "seed") {
        cfg.augment.seed = static_cast<uint64_t>(std::stoull(value));
    } else if (key == "palette") {
        // "idx:r,g,b;idx:r,g,b;..."
        for (const std::string& entry : split(value, ';')) {
            if (entry.empty()) continue;
            const auto kv = split(entry, ':');
            if (kv.size() != 2) throw UsageError("bad palette entry '" + entry + "'");
            const int idx = static_cast<int>(parse_double(kv[0], "palette index"));
            const auto rgb = split(kv[1], ',');
            if (idx < 0 || rgb.size() != 3) {
                throw UsageError("bad palette entry '" + entry + "'");
            }
            if (static_cast<size_t>(idx) >= cfg.palette.size()) {
                cfg.palette.resize(idx + 1);
            }
            cfg.palette[idx] = {
                static_cast<uint8_t>(parse_double(rgb[0], "palette r")),
                static_cast<uint8_t>(parse_double(rgb[1], "palette g")),
                static_cast<uint8_t>(parse_double(rgb[2], "palette b"))};
        }
    } else {
        throw UsageError("unknown config key '" + key + "'");
    }
}

void load_config_file(Config& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw rtwarp::io::IoError("cannot open config " + path);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

// Environment overrides: RTWARP_<KEY> beats the config file, flags beat both.
void apply_env_overrides(Config& cfg) {
    static const std::pair<const char*, const char*> kVars[] = {
        {"RTWARP_SIZE", "size"},           {"RTWARP_BORDER", "border"},
        {"RTWARP_LAMBDA", "lambda"},       {"RTWARP_MAX_SHIFT_FRAC", "max_shift_frac"},
        {"RTWARP_SCALE_LO", "scale_lo"},   {"RTWARP_SCALE_HI", "scale_hi"},
        {"RTWARP_SEED", "seed"},           {"RTWARP_PALETTE", "palette"},
    };
    for (const auto& [env, key] : kVars) {
        if (const char* v = std::getenv(env)) apply_config_entry(cfg, key, v);
    }
}

PaletteEntry palette_color(const Config& cfg, int cls) {
    if (static_cast<size_t>(cls) < cfg.palette.size()) return cfg.palette[cls];
    // fallback: spread hues deterministically
    const uint8_t v = static_cast<uint8_t>((cls * 97) % 256);
    const uint8_t u = static_cast<uint8_t>((cls * 53 + 128) % 256);
    return {v, u, static_cast<uint8_t>(255 - v)};
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int cmd_warp(const Config& cfg, const std::string& input, const std::string& output,
             const std::string& bbox_arg, const std::string& bbox_file) {
    const rtwarp::geometry::BBox bbox = load_bbox(bbox_arg, bbox_file);
    const rtwarp::Tensor img = rtwarp::io::read_png(input);
    rtwarp::warp::SamplingGrid grid =
        rtwarp::warp::make_forward_grid(bbox, cfg.height, cfg.width);
    grid.border = cfg.border;
    rtwarp::io::write_png(output, rtwarp::warp::bilinear_sample(img, grid));
    return kExitOk;
}

int cmd_unwarp(const Config& cfg, const std::string& input, const std::string& output,
               const std::string& bbox_arg, const std::string& bbox_file,
               const std::string& out_size, const std::string& overlay_path) {
    const rtwarp::geometry::BBox bbox = load_bbox(bbox_arg, bbox_file);
    if (out_size.empty()) throw UsageError("--out-size is required for unwarp");
    const auto [oh, ow] = parse_size(out_size);

    rtwarp::Tensor scores;
    if (ends_with(input, ".png")) {
        scores = rtwarp::io::read_png(input);
        if (scores.c != 1) throw ShapeError("PNG scores must be single-channel");
    } else {
        scores = rtwarp::io::read_tensor(input);
    }
    if (scores.n != 1) throw ShapeError("scores batch dimension must be 1");
    if (scores.h != cfg.height || scores.w != cfg.width) {
        std::ostringstream os;
        os << "scores are " << scores.h << "x" << scores.w
           << " but the configured raster is " << cfg.height << "x" << cfg.width;
        throw ShapeError(os.str());
    }

    if (scores.c == 1) {
        rtwarp::io::write_png(output,
                              rtwarp::warp::unwarp_scores(scores, bbox, oh, ow));
    } else {
        const rtwarp::LabelMask mask =
            rtwarp::warp::unwarp_labels(scores, bbox, oh, ow);
        rtwarp::io::write_mask_png(output, mask);
        if (!overlay_path.empty()) {
            rtwarp::Tensor rgb(1, 3, oh, ow);
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    const PaletteEntry p = palette_color(cfg, mask.at(y, x));
                    rgb.at(0, 0, y, x) = p.r;
                    rgb.at(0, 1, y, x) = p.g;
                    rgb.at(0, 2, y, x) = p.b;
                }
            }
            rtwarp::io::write_png(overlay_path, rgb);
        }
    }
    return kExitOk;
}

int cmd_griddump(const Config& cfg, const std::string& direction,
                 const std::string& output, const std::string& bbox_arg,
                 const std::string& bbox_file, const std::string& out_size) {
    using rtwarp::io::GridDirection;
    if (direction == "forward") {
        const auto bbox = load_bbox(bbox_arg, bbox_file);
        rtwarp::io::write_grid(
            output, rtwarp::warp::make_forward_grid(bbox, cfg.height, cfg.width),
            GridDirection::Forward);
    } else if (direction == "inverse") {
        const auto bbox = load_bbox(bbox_arg, bbox_file);
        if (out_size.empty()) {
            throw UsageError("--out-size (Cartesian dims) is required for inverse grids");
        }
        const auto [oh, ow] = parse_size(out_size);
        rtwarp::io::write_grid(
            output,
            rtwarp::warp::make_inverse_grid(bbox, oh, ow, cfg.height, cfg.width),
            GridDirection::Inverse);
    } else if (direction == "tp2tc") {
        rtwarp::io::write_grid(output,
                               rtwarp::nn::inter_grid_tp_to_tc(cfg.height, cfg.width),
                               GridDirection::TpToTc);
    } else if (direction == "tc2tp") {
        rtwarp::io::write_grid(output,
                               rtwarp::nn::inter_grid_tc_to_tp(cfg.height, cfg.width),
                               GridDirection::TcToTp);
    } else {
        throw UsageError("direction must be forward, inverse, tp2tc or tc2tp");
    }
    return kExitOk;
}

int cmd_check(const std::string& suite) {
    std::vector<rtwarp::checks::CheckResult> results;
    try {
        results = rtwarp::checks::run_suite(suite);
    } catch (const rtwarp::checks::UnknownSuiteError& e) {
        std::cerr << e.what() << "\navailable suites:";
        for (const std::string& name : rtwarp::checks::suite_names()) {
            std::cerr << " " << name;
        }
        std::cerr << "\n";
        return kExitUsage;
    }
    bool all_ok = true;
    for (const auto& r : results) {
        if (r.passed) {
            std::cout << "PASS " << r.name << "\n";
        } else {
            std::cout << "FAIL " << r.name << ": " << r.detail << "\n";
            all_ok = false;
        }
    }
    std::cout << (all_ok ? "all checks passed" : "some checks FAILED") << "\n";
    return all_ok ? kExitOk : 1;
}

std::vector<std::pair<std::string, std::vector<int>>> parse_groups(
    const std::string& spec) {
    // "Name:1,2,3;Other:4,5"
    std::vector<std::pair<std::string, std::vector<int>>> groups;
    for (const std::string& entry : split(spec, ';')) {
        if (entry.empty()) continue;
        const auto kv = split(entry, ':');
        if (kv.size() != 2) throw UsageError("bad group entry '" + entry + "'");
        std::vector<int> classes;
        for (const std::string& c : split(kv[1], ',')) {
            classes.push_back(static_cast<int>(parse_double(c, "group class index")));
        }
        if (classes.empty()) throw UsageError("empty group '" + kv[0] + "'");
        groups.emplace_back(kv[0], std::move(classes));
    }
    return groups;
}

int cmd_eval(const std::vector<std::string>& pred_paths,
             const std::vector<std::string>& gt_paths, int num_classes,
             const std::string& groups_spec, const std::string& report_path,
             bool include_background) {
    if (pred_paths.size() != gt_paths.size() || pred_paths.empty()) {
        throw UsageError("need equally many --pred and --gt masks");
    }
    const auto groups = parse_groups(groups_spec);
    std::vector<std::vector<int>> group_classes;
    for (const auto& [name, classes] : groups) group_classes.push_back(classes);

    rtwarp::metrics::ConfusionMatrix cm(num_classes);
    rtwarp::metrics::ConfusionMatrix merged_cm(static_cast<int>(groups.size()) + 1);
    for (size_t i = 0; i < pred_paths.size(); ++i) {
        const rtwarp::LabelMask pred =
            rtwarp::io::read_mask_png(pred_paths[i], num_classes);
        const rtwarp::LabelMask gt = rtwarp::io::read_mask_png(gt_paths[i], num_classes);
        if (pred.height != gt.height || pred.width != gt.width) {
            throw ShapeError("mask dims differ: " + pred_paths[i] + " vs " +
                             gt_paths[i]);
        }
        cm += rtwarp::metrics::confusion(pred, gt);
        if (!groups.empty()) {
            merged_cm += rtwarp::metrics::confusion(
                rtwarp::metrics::relabel_by_groups(pred, group_classes),
                rtwarp::metrics::relabel_by_groups(gt, group_classes));
        }
    }

    std::ostringstream report;
    report << rtwarp::metrics::format_report(
        rtwarp::metrics::iou_f1(cm, include_background));
    if (!groups.empty()) {
        std::vector<std::string> names = {"ungrouped"};
        for (const auto& [name, classes] : groups) names.push_back("merged." + name);
        report << rtwarp::metrics::format_report(
            rtwarp::metrics::iou_f1(merged_cm, include_background), names);
    }

    if (report_path.empty() || report_path == "-") {
        std::cout << report.str();
    } else {
        std::ofstream os(report_path);
        if (!os) throw rtwarp::io::IoError("cannot open report " + report_path);
        os << report.str();
    }
    return kExitOk;
}

int cmd_augbox(const Config& cfg, const std::string& bbox_arg,
               const std::string& bbox_file, uint64_t draw_index) {
    const rtwarp::geometry::BBox bbox = load_bbox(bbox_arg, bbox_file);
    const rtwarp::geometry::BBox out =
        rtwarp::warp::augment_bbox(bbox, cfg.augment, draw_index);
    std::cout.precision(10);
    std::cout << out.x << "," << out.y << "," << out.w << "," << out.h << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RoI Tanh-polar transform toolkit"};
    app.require_subcommand(1);

    std::string size_arg, bbox_arg, bbox_file, config_path;
    std::optional<uint64_t> seed_arg;
    app.add_option("--size", size_arg, "Tanh-polar raster size as HxW (default 512x512)");
    app.add_option("--bbox", bbox_arg, "face bounding box as x,y,w,h");
    app.add_option("--bbox-file", bbox_file, "one-line sidecar file holding x,y,w,h");
    app.add_option("--seed", seed_arg, "augmentation seed");
    app.add_option("--config", config_path, "key=value config file");

    auto* warp_cmd = app.add_subcommand("warp", "forward-transform an image");
    std::string warp_in, warp_out;
    warp_cmd->add_option("input", warp_in, "input PNG")->required();
    warp_cmd->add_option("output", warp_out, "output PNG")->required();

    auto* unwarp_cmd = app.add_subcommand("unwarp", "inverse-transform score maps");
    std::string unwarp_in, unwarp_out, out_size, overlay_path;
    unwarp_cmd->add_option("input", unwarp_in, "score tensor (.rtw) or single-channel PNG")
        ->required();
    unwarp_cmd->add_option("output", unwarp_out, "output PNG (mask for multi-channel)")
        ->required();
    unwarp_cmd->add_option("--out-size", out_size, "original image dims as HxW");
    unwarp_cmd->add_option("--overlay", overlay_path, "also write a colorized overlay PNG");

    auto* grid_cmd = app.add_subcommand("griddump", "export a sampling grid");
    std::string grid_dir, grid_out, grid_out_size;
    grid_cmd->add_option("--direction", grid_dir, "forward|inverse|tp2tc|tc2tp")
        ->required();
    grid_cmd->add_option("output", grid_out, "output grid file")->required();
    grid_cmd->add_option("--out-size", grid_out_size, "Cartesian dims for inverse grids");

    auto* check_cmd = app.add_subcommand("check", "run invariant self-checks");
    std::string suite = "all";
    check_cmd->add_option("suite", suite, "suite name (default: all)");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate predicted masks");
    std::vector<std::string> pred_paths, gt_paths;
    std::string groups_spec, report_path;
    int num_classes = 11;
    bool include_background = false;
    eval_cmd->add_option("--pred", pred_paths, "predicted mask PNGs")->required();
    eval_cmd->add_option("--gt", gt_paths, "ground-truth mask PNGs")->required();
    eval_cmd->add_option("--classes", num_classes, "class count (default 11)");
    eval_cmd->add_option("--groups", groups_spec, "merged regions, e.g. Inner:2,3,4;Mouth:7,8,9");
    eval_cmd->add_option("--report", report_path, "report file (default stdout)");
    eval_cmd->add_flag("--include-background", include_background,
                       "include class 0 in the means");

    auto* aug_cmd = app.add_subcommand("augbox", "print an augmented bounding box");
    uint64_t draw_index = 0;
    double max_shift_frac = -1.0, scale_lo = -1.0, scale_hi = -1.0;
    aug_cmd->add_option("--draw", draw_index, "draw index (default 0)");
    aug_cmd->add_option("--max-shift-frac", max_shift_frac, "max center shift fraction");
    aug_cmd->add_option("--scale-lo", scale_lo, "lower scale bound");
    aug_cmd->add_option("--scale-hi", scale_hi, "upper scale bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        Config cfg;
        if (!config_path.empty()) load_config_file(cfg, config_path);
        apply_env_overrides(cfg);
        if (!size_arg.empty()) std::tie(cfg.height, cfg.width) = parse_size(size_arg);
        if (seed_arg) cfg.augment.seed = *seed_arg;
        if (max_shift_frac >= 0.0) cfg.augment.max_shift_frac = max_shift_frac;
        if (scale_lo > 0.0) cfg.augment.scale_lo = scale_lo;
        if (scale_hi > 0.0) cfg.augment.scale_hi = scale_hi;

        if (*warp_cmd) return cmd_warp(cfg, warp_in, warp_out, bbox_arg, bbox_file);
        if (*unwarp_cmd) {
            return cmd_unwarp(cfg, unwarp_in, unwarp_out, bbox_arg, bbox_file,
                              out_size, overlay_path);
        }
        if (*grid_cmd) {
            return cmd_griddump(cfg, grid_dir, grid_out, bbox_arg, bbox_file,
                                grid_out_size);
        }
        if (*check_cmd) return cmd_check(suite);
        if (*eval_cmd) {
            return cmd_eval(pred_paths, gt_paths, num_classes, groups_spec,
                            report_path, include_background);
        }
        if (*aug_cmd) return cmd_augbox(cfg, bbox_arg, bbox_file, draw_index);
        return kExitUsage;
    } catch (const BBoxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBBox;
    } catch (const rtwarp::geometry::InvalidBBoxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBBox;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const rtwarp::io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
