#include "hvis/results.hpp"

#include <algorithm>
#include <set>

#include "json_util.hpp"

namespace hvis {

using namespace io_detail;

std::string serialize_results(std::span<const ResultSequence> results) {
    json videos = json::array();
    for (const auto& seq : results) {
        json frames = json::array();
        for (const auto& f : seq.frames) {
            json items = json::array();
            for (const auto& item : f.items) {
                json j = {{"id", item.id}};
                if (item.box) {
                    j["box"] = {item.box->x_min, item.box->y_min, item.box->x_max, item.box->y_max};
                }
                if (item.mask) {
                    j["rle"] = rle_json(*item.mask);
                }
                items.push_back(std::move(j));
            }
            frames.push_back({{"frame", f.frame}, {"items", std::move(items)}});
        }
        videos.push_back({{"id", seq.video_id},
                          {"width", seq.width},
                          {"height", seq.height},
                          {"frames", std::move(frames)}});
    }
    json doc = {{"format_version", kFormatVersion}, {"videos", std::move(videos)}};
    return doc.dump() + "\n";
}

std::vector<ResultSequence> parse_results(std::string_view text, std::string_view source) {
    const json doc = parse_document(text, source);
    check_version(doc, "results");
    const json& videos = field(doc, "videos", "results");
    if (!videos.is_array()) {
        throw Error(ErrorCode::SchemaError, "results.videos must be an array");
    }
    std::vector<ResultSequence> out;
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const std::string vw = "videos[" + std::to_string(v) + "]";
        ResultSequence seq;
        seq.video_id = string_field(videos[v], "id", vw);
        seq.width = int_field(videos[v], "width", vw);
        seq.height = int_field(videos[v], "height", vw);
        if (seq.width < 1 || seq.height < 1) {
            throw Error(ErrorCode::SchemaError, vw + " has non-positive dimensions");
        }
        const json& frames = field(videos[v], "frames", vw);
        if (!frames.is_array()) {
            throw Error(ErrorCode::SchemaError, vw + ".frames must be an array");
        }
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const std::string fw = vw + ".frames[" + std::to_string(f) + "]";
            ResultFrame frame;
            frame.frame = int_field(frames[f], "frame", fw);
            const json& items = field(frames[f], "items", fw);
            if (!items.is_array()) {
                throw Error(ErrorCode::SchemaError, fw + ".items must be an array");
            }
            std::set<int> seen;
            for (std::size_t i = 0; i < items.size(); ++i) {
                const std::string iw = fw + ".items[" + std::to_string(i) + "]";
                ResultItem item;
                item.id = int_field(items[i], "id", iw);
                if (!seen.insert(item.id).second) {
                    throw Error(ErrorCode::InconsistentIds,
                                "id " + std::to_string(item.id) + " appears twice in " + fw);
                }
                if (const auto it = items[i].find("box"); it != items[i].end()) {
                    if (!it->is_array() || it->size() != 4 ||
                        !std::all_of(it->begin(), it->end(),
                                     [](const json& c) { return c.is_number(); })) {
                        throw Error(ErrorCode::SchemaError, iw + ".box must be 4 numbers");
                    }
                    item.box = Box{(*it)[0].get<double>(), (*it)[1].get<double>(),
                                   (*it)[2].get<double>(), (*it)[3].get<double>()};
                }
                if (items[i].contains("rle") || items[i].contains("polygon")) {
                    item.mask = mask_field(items[i], seq.width, seq.height, iw);
                }
                frame.items.push_back(std::move(item));
            }
            seq.frames.push_back(std::move(frame));
        }
        out.push_back(std::move(seq));
    }
    return out;
}

void save_results(const std::filesystem::path& path, std::span<const ResultSequence> results) {
    write_file(path, serialize_results(results));
}

std::vector<ResultSequence> load_results(const std::filesystem::path& path) {
    return parse_results(read_file(path), path.string());
}

std::vector<FrameResult> to_frame_results(const ResultSequence& sequence) {
    std::vector<FrameResult> out;
    out.reserve(sequence.frames.size());
    for (const auto& f : sequence.frames) {
        FrameResult r;
        r.frame = f.frame;
        for (const auto& item : f.items) {
            if (!item.mask) {
                throw Error(ErrorCode::SchemaError,
                            "result id " + std::to_string(item.id) + " in frame " +
                                std::to_string(f.frame) + " has no mask to evaluate");
            }
            r.items.push_back({item.id, *item.mask});
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace hvis
