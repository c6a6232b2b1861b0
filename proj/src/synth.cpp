#include "hvis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "hvis/error.hpp"
#include "hvis/losses.hpp"
#include "hvis/rle.hpp"

namespace hvis {

namespace {

void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

void validate(const SynthConfig& cfg) {
    if (cfg.width < 32 || cfg.height < 32) {
        invalid("synthetic frames must be at least 32x32");
    }
    if (cfg.instances < 1 || cfg.frames < 1 || cfg.videos < 1) {
        invalid("need at least one video, instance and frame");
    }
    if (cfg.min_size < 2 || cfg.max_size < cfg.min_size || cfg.max_size >= cfg.width ||
        cfg.max_size >= cfg.height) {
        invalid("object sizes must satisfy 2 <= min_size <= max_size < frame size");
    }
    if (cfg.min_speed < 0.0 || cfg.max_speed < cfg.min_speed) {
        invalid("speeds must satisfy 0 <= min_speed <= max_speed");
    }
    if (cfg.embedding_dim < 2) {
        invalid("embedding_dim must be >= 2");
    }
    if (cfg.min_separation < 0.0 || cfg.min_separation > 1.0) {
        invalid("min_separation must lie in [0, 1]");
    }
    if (cfg.embedding_noise < 0.0 || cfg.detection_noise < 0.0) {
        invalid("noise levels must be nonnegative");
    }
    for (const auto& e : cfg.occlusions) {
        if (e.id < 1 || e.id > cfg.instances || e.first < 0 || e.last < e.first ||
            e.last >= cfg.frames) {
            invalid("occlusion event for id " + std::to_string(e.id) + " is out of range");
        }
    }
    if (cfg.random_occlusions < 0 || cfg.occlusion_length < 1) {
        invalid("random occlusions need a positive length");
    }
    if (cfg.random_occlusions > 0 && cfg.frames < cfg.occlusion_length + 2) {
        invalid("video too short for the requested occlusion length");
    }
}

struct MovingObject {
    int id = 0;
    bool ellipse = false;
    int w = 0;
    int h = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    Embedding base;
};

BinaryMask draw(const MovingObject& o, int left, int top, int width, int height) {
    BinaryMask mask(width, height);
    const double cx = left + 0.5 * o.w;
    const double cy = top + 0.5 * o.h;
    for (int y = std::max(0, top); y < std::min(height, top + o.h); ++y) {
        for (int x = std::max(0, left); x < std::min(width, left + o.w); ++x) {
            if (o.ellipse) {
                const double dx = (x + 0.5 - cx) / (0.5 * o.w);
                const double dy = (y + 0.5 - cy) / (0.5 * o.h);
                if (dx * dx + dy * dy > 1.0) {
                    continue;
                }
            }
            mask.set(x, y);
        }
    }
    return mask;
}

double pick_velocity(Rng& rng, const SynthConfig& cfg, int extent, int size) {
    const double speed = rng.uniform(cfg.min_speed, cfg.max_speed);
    const double limit =
        cfg.frames > 1 ? static_cast<double>(extent - size) / (cfg.frames - 1) : speed;
    const double v = std::min(speed, limit);
    return rng.uniform01() < 0.5 ? -v : v;
}

double pick_start(Rng& rng, int extent, int size, double v, int frames) {
    const double travel = v * (frames - 1);
    const double lo = std::max(0.0, -travel);
    const double hi = std::min(static_cast<double>(extent - size), extent - size - travel);
    return hi > lo ? rng.uniform(lo, hi) : lo;
}

std::vector<Embedding> base_embeddings(Rng& rng, int count, int dim, double min_separation) {
    std::vector<Embedding> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > 1000 * count) {
            invalid("cannot draw embeddings with the requested min_separation");
        }
        Embedding e(dim);
        for (int i = 0; i < dim; ++i) {
            e(i) = rng.normal();
        }
        e.normalize();
        const bool separated = std::all_of(out.begin(), out.end(), [&](const Embedding& o) {
            return cosine_distance(o, e) >= min_separation;
        });
        if (separated) {
            out.push_back(std::move(e));
        }
    }
    return out;
}

bool occluded(const std::vector<OcclusionEvent>& events, int id, int frame) {
    return std::any_of(events.begin(), events.end(), [&](const OcclusionEvent& e) {
        return e.id == id && frame >= e.first && frame <= e.last;
    });
}

}  // namespace

SynthScene generate_synthetic(const SynthConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    SynthScene scene;

    for (int v = 0; v < cfg.videos; ++v) {
        char name[32];
        std::snprintf(name, sizeof(name), "synth-%03d", v);

        std::vector<MovingObject> objects;
        const auto bases = base_embeddings(rng, cfg.instances, cfg.embedding_dim, cfg.min_separation);
        for (int i = 0; i < cfg.instances; ++i) {
            MovingObject o;
            o.id = i + 1;
            o.ellipse = (o.id % 2) == 0;
            o.w = cfg.min_size + static_cast<int>(rng.uniform_index(
                                     static_cast<std::size_t>(cfg.max_size - cfg.min_size + 1)));
            o.h = cfg.min_size + static_cast<int>(rng.uniform_index(
                                     static_cast<std::size_t>(cfg.max_size - cfg.min_size + 1)));
            o.vx = pick_velocity(rng, cfg, cfg.width, o.w);
            o.vy = pick_velocity(rng, cfg, cfg.height, o.h);
            o.x0 = pick_start(rng, cfg.width, o.w, o.vx, cfg.frames);
            o.y0 = pick_start(rng, cfg.height, o.h, o.vy, cfg.frames);
            o.base = bases[static_cast<std::size_t>(i)];
            objects.push_back(std::move(o));
        }

        std::vector<OcclusionEvent> events = cfg.occlusions;
        for (int k = 0; k < cfg.random_occlusions; ++k) {
            const int id = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cfg.instances)));
            // start >= 1 and leave at least one frame after the window
            const int first = 1 + static_cast<int>(rng.uniform_index(
                                      static_cast<std::size_t>(cfg.frames - cfg.occlusion_length - 1)));
            events.push_back({id, first, first + cfg.occlusion_length - 1});
        }

        AnnotatedSequence gt{name, cfg.width, cfg.height, {}};
        DetectionSequence dets{name, cfg.width, cfg.height, {}};
        const double emb_sigma = cfg.embedding_noise / std::sqrt(static_cast<double>(cfg.embedding_dim));

        for (int f = 0; f < cfg.frames; ++f) {
            AnnotatedFrame gframe{f, {}};
            DetectionFrame dframe{f, {}};
            for (const auto& o : objects) {
                const int left = static_cast<int>(std::lround(o.x0 + o.vx * f));
                const int top = static_cast<int>(std::lround(o.y0 + o.vy * f));
                BinaryMask mask = draw(o, left, top, cfg.width, cfg.height);
                const bool hidden = occluded(events, o.id, f);
                if (hidden && cfg.occlusion_hides_gt) {
                    continue;
                }
                const BoundingBox box = mask_bbox(mask);
                if (!hidden) {
                    Detection d;
                    d.frame = f;
                    d.score = rng.uniform(0.7, 1.0);
                    d.embedding = o.base;
                    if (emb_sigma > 0.0) {
                        for (Eigen::Index i = 0; i < d.embedding.size(); ++i) {
                            d.embedding(i) += emb_sigma * rng.normal();
                        }
                    }
                    if (cfg.detection_noise > 0.0) {
                        const double jx = cfg.detection_noise * rng.normal();
                        const double jy = cfg.detection_noise * rng.normal();
                        const double jw = cfg.detection_noise * rng.normal();
                        const double jh = cfg.detection_noise * rng.normal();
                        Box b = to_box(box);
                        b = {b.x_min + jx - 0.5 * jw, b.y_min + jy - 0.5 * jh,
                             b.x_max + jx + 0.5 * jw, b.y_max + jy + 0.5 * jh};
                        if (!b.valid()) {
                            b = to_box(box);
                        }
                        d.box = b;
                        BinaryMask shifted = draw(o, left + static_cast<int>(std::lround(jx)),
                                                  top + static_cast<int>(std::lround(jy)),
                                                  cfg.width, cfg.height);
                        d.mask = shifted.empty() ? mask : std::move(shifted);
                    } else {
                        d.box = to_box(box);
                        d.mask = mask;
                    }
                    dframe.detections.push_back(std::move(d));
                }
                gframe.instances.push_back(make_instance(o.id, std::move(mask), f));
            }
            gt.frames.push_back(std::move(gframe));
            dets.frames.push_back(std::move(dframe));
        }
        scene.ground_truth.push_back(std::move(gt));
        scene.detections.push_back(std::move(dets));
        scene.occlusions.push_back(std::move(events));
    }
    return scene;
}

namespace {

using Ring = std::vector<double>;

Ring thick_segment(double x0, double y0, double x1, double y1, double thickness) {
    const double len = std::hypot(x1 - x0, y1 - y0);
    const double nx = len > 0 ? -(y1 - y0) / len * 0.5 * thickness : 0.5 * thickness;
    const double ny = len > 0 ? (x1 - x0) / len * 0.5 * thickness : 0.0;
    return {x0 + nx, y0 + ny, x1 + nx, y1 + ny, x1 - nx, y1 - ny, x0 - nx, y0 - ny};
}

Ring disc(double cx, double cy, double r) {
    Ring ring;
    constexpr int kSides = 20;
    for (int i = 0; i < kSides; ++i) {
        const double a = 2.0 * std::numbers::pi * i / kSides;
        ring.push_back(cx + r * std::cos(a));
        ring.push_back(cy + r * std::sin(a));
    }
    return ring;
}

Ring rect(double x0, double y0, double x1, double y1) { return {x0, y0, x1, y0, x1, y1, x0, y1}; }

// Union of the body parts; each part is filled separately so overlapping
// parts do not cancel under the even-odd rule.
BinaryMask draw_figure(Rng& rng, double cx, double top, double height, int width, int image_h) {
    const double r = 0.09 * height;
    const double shoulder_y = top + 2.0 * r;
    const double torso_w = 0.3 * height;
    const double hip_y = shoulder_y + 0.35 * height;
    const double leg_len = top + height - hip_y;
    const double lean = rng.uniform(-0.08, 0.08) * height;

    std::vector<Ring> parts;
    parts.push_back(disc(cx + lean, top + r, r));
    parts.push_back(rect(cx - 0.5 * torso_w, shoulder_y, cx + 0.5 * torso_w, hip_y));
    for (int side : {-1, 1}) {
        const double spread = rng.uniform(0.06, 0.2) * height;
        parts.push_back(thick_segment(cx + side * 0.08 * height, hip_y, cx + side * spread,
                                      hip_y + leg_len, 0.14 * height));
        const double angle = rng.uniform(0.1, 1.4);  // radians away from hanging down
        const double arm_len = 0.38 * height;
        const double sx = cx + side * 0.5 * torso_w;
        const double sy = shoulder_y + 0.03 * height;
        parts.push_back(thick_segment(sx, sy, sx + side * arm_len * std::sin(angle),
                                      sy + arm_len * std::cos(angle), 0.09 * height));
    }
    BinaryMask mask(width, image_h);
    for (const auto& part : parts) {
        const Ring* one = &part;
        const BinaryMask piece = rasterize_polygons(std::span<const Ring>(one, 1), width, image_h);
        for (int y = 0; y < image_h; ++y) {
            for (int x = 0; x < width; ++x) {
                if (piece.at(x, y)) {
                    mask.set(x, y);
                }
            }
        }
    }
    return mask;
}

}  // namespace

std::vector<AnnotatedSequence> generate_occlusion_corpus(const OcclusionCorpusConfig& cfg) {
    if (cfg.scenes < 1 || cfg.min_people < 1 || cfg.max_people < cfg.min_people ||
        cfg.width < 64 || cfg.height < 64 || cfg.min_height < 16.0 ||
        cfg.max_height < cfg.min_height || cfg.max_height > cfg.height - 4) {
        invalid("invalid occlusion corpus configuration");
    }
    constexpr std::int64_t kMinVisibleArea = 64;
    Rng rng(cfg.seed);
    std::vector<AnnotatedSequence> corpus;
    for (int s = 0; s < cfg.scenes; ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "occl-%03d", s);
        const int people =
            cfg.min_people + static_cast<int>(rng.uniform_index(
                                 static_cast<std::size_t>(cfg.max_people - cfg.min_people + 1)));
        const double anchor_x = rng.uniform(0.35, 0.65) * cfg.width;
        std::vector<BinaryMask> figures;
        for (int p = 0; p < people; ++p) {
            const double h = rng.uniform(cfg.min_height, cfg.max_height);
            const double cx = anchor_x + rng.uniform(-0.3, 0.3) * h;
            const double top = rng.uniform(2.0, cfg.height - h - 2.0);
            figures.push_back(draw_figure(rng, cx, top, h, cfg.width, cfg.height));
        }
        AnnotatedFrame frame{0, {}};
        for (int p = 0; p < people; ++p) {
            BinaryMask visible = figures[static_cast<std::size_t>(p)];
            for (int q = p + 1; q < people; ++q) {
                const BinaryMask& front = figures[static_cast<std::size_t>(q)];
                for (int y = 0; y < cfg.height; ++y) {
                    for (int x = 0; x < cfg.width; ++x) {
                        if (front.at(x, y)) {
                            visible.set(x, y, false);
                        }
                    }
                }
            }
            if (visible.area() >= kMinVisibleArea) {
                frame.instances.push_back(make_instance(p + 1, std::move(visible), 0));
            }
        }
        corpus.push_back({name, cfg.width, cfg.height, {std::move(frame)}});
    }
    return corpus;
}

}  // namespace hvis
