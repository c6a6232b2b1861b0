#include "hvis/annotations.hpp"

#include <set>

#include "json_util.hpp"

namespace hvis {

using namespace io_detail;

std::vector<AnnotatedSequence> parse_annotations(std::string_view text, std::string_view source) {
    const json doc = parse_document(text, source);
    check_version(doc, "annotations");
    const json& videos = field(doc, "videos", "annotations");
    if (!videos.is_array()) {
        throw Error(ErrorCode::SchemaError, "annotations.videos must be an array");
    }

    std::vector<AnnotatedSequence> dataset;
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const std::string vw = "videos[" + std::to_string(v) + "]";
        const json& jv = videos[v];
        AnnotatedSequence seq;
        seq.video_id = string_field(jv, "id", vw);
        seq.width = int_field(jv, "width", vw);
        seq.height = int_field(jv, "height", vw);
        if (seq.width < 1 || seq.height < 1) {
            throw Error(ErrorCode::SchemaError, vw + " has non-positive dimensions");
        }
        const json& frames = field(jv, "frames", vw);
        if (!frames.is_array()) {
            throw Error(ErrorCode::SchemaError, vw + ".frames must be an array");
        }
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const std::string fw = vw + ".frames[" + std::to_string(f) + "]";
            AnnotatedFrame frame;
            frame.frame = int_field(frames[f], "frame", fw);
            const json& instances = field(frames[f], "instances", fw);
            if (!instances.is_array()) {
                throw Error(ErrorCode::SchemaError, fw + ".instances must be an array");
            }
            std::set<int> seen;
            for (std::size_t i = 0; i < instances.size(); ++i) {
                const std::string iw = fw + ".instances[" + std::to_string(i) + "]";
                const int id = int_field(instances[i], "id", iw);
                if (id < 1) {
                    throw Error(ErrorCode::SchemaError, iw + ".id must be >= 1");
                }
                if (!seen.insert(id).second) {
                    throw Error(ErrorCode::InconsistentIds,
                                "id " + std::to_string(id) + " appears twice in " + fw);
                }
                BinaryMask mask = mask_field(instances[i], seq.width, seq.height, iw);
                if (mask.empty()) {
                    throw Error(ErrorCode::SchemaError, iw + " has an empty mask");
                }
                frame.instances.push_back(make_instance(id, std::move(mask), frame.frame));
            }
            seq.frames.push_back(std::move(frame));
        }
        dataset.push_back(std::move(seq));
    }
    return dataset;
}

std::vector<AnnotatedSequence> load_annotations(const std::filesystem::path& path) {
    return parse_annotations(read_file(path), path.string());
}

std::string serialize_annotations(std::span<const AnnotatedSequence> dataset) {
    json videos = json::array();
    for (const auto& seq : dataset) {
        json frames = json::array();
        for (const auto& f : seq.frames) {
            json instances = json::array();
            for (const auto& inst : f.instances) {
                instances.push_back({{"id", inst.instance_id}, {"rle", rle_json(inst.mask)}});
            }
            frames.push_back({{"frame", f.frame}, {"instances", std::move(instances)}});
        }
        videos.push_back({{"id", seq.video_id},
                          {"width", seq.width},
                          {"height", seq.height},
                          {"frames", std::move(frames)}});
    }
    json doc = {{"format_version", kFormatVersion}, {"videos", std::move(videos)}};
    return doc.dump() + "\n";
}

void save_annotations(const std::filesystem::path& path,
                      std::span<const AnnotatedSequence> dataset) {
    write_file(path, serialize_annotations(dataset));
}

std::vector<FrameResult> to_frame_results(const AnnotatedSequence& sequence) {
    std::vector<FrameResult> out;
    out.reserve(sequence.frames.size());
    for (const auto& f : sequence.frames) {
        FrameResult r;
        r.frame = f.frame;
        for (const auto& inst : f.instances) {
            r.items.push_back({inst.instance_id, inst.mask});
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace hvis
