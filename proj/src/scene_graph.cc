/* Copyright 2026 The mrg-bench Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "mrg/corpus_io.h"
#include "mrg/dataset.h"
#include "mrg/errors.h"

namespace mrg {
namespace {

std::string GroupKey(const SceneObject& object) {
  std::string key = BaseName(object.primary_name());
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return key;
}

std::vector<std::string> StringList(const Json& record, const char* key) {
  std::vector<std::string> out;
  if (!record.contains(key)) return out;
  const Json& list = record.at(key);
  if (!list.is_array()) {
    throw ParseError(std::string("field '") + key + "' must be an array", 0);
  }
  for (const Json& v : list) out.push_back(v.get<std::string>());
  return out;
}

}  // namespace

const SceneObject* SceneGraph::find(std::size_t object_id) const {
  for (const SceneObject& o : objects) {
    if (o.object_id == object_id) return &o;
  }
  return nullptr;
}

bool SceneGraph::has_referential_integrity() const {
  return std::all_of(relationships.begin(), relationships.end(),
                     [&](const Relationship& r) {
                       return find(r.subject_id) && find(r.object_id);
                     });
}

SceneGraph SceneGraphFromJson(const Json& record) {
  SceneGraph graph;
  graph.image_id = RequireString(record, "image_id");
  graph.image_dims.width = RequireField(record, "image_width").get<int>();
  graph.image_dims.height = RequireField(record, "image_height").get<int>();

  CorpusHeader coords;
  coords.scale = CoordinateScale::kPixel;
  coords.box_format = BoxFormat::kCorners;
  if (record.contains("box_format")) {
    coords.box_format = ParseBoxFormat(RequireString(record, "box_format"));
  }
  if (record.contains("coordinate_scale")) {
    coords.scale = HeaderFromJson(record).scale;
  }

  std::set<std::size_t> ids;
  if (record.contains("objects")) {
    for (const Json& o : record.at("objects")) {
      SceneObject object;
      object.object_id = RequireField(o, "object_id").get<std::size_t>();
      if (!ids.insert(object.object_id).second) {
        throw ParseError(
            "duplicate object_id " + std::to_string(object.object_id), 0);
      }
      object.names = StringList(o, "names");
      object.attributes = StringList(o, "attributes");
      object.box = BoxFromJson(RequireField(o, "box"), coords, graph.image_dims);
      graph.objects.push_back(std::move(object));
    }
  }
  if (record.contains("relationships")) {
    for (const Json& r : record.at("relationships")) {
      Relationship rel;
      rel.subject_id = RequireField(r, "subject_id").get<std::size_t>();
      rel.predicate = RequireString(r, "predicate");
      rel.object_id = RequireField(r, "object_id").get<std::size_t>();
      if (!ids.count(rel.subject_id) || !ids.count(rel.object_id)) {
        throw ParseError("relationship references an unknown object", 0);
      }
      graph.relationships.push_back(std::move(rel));
    }
  }
  return graph;
}

Json SceneGraphToJson(const SceneGraph& graph) {
  Json objects = Json::array();
  for (const SceneObject& o : graph.objects) {
    objects.push_back(Json{{"object_id", o.object_id},
                           {"names", o.names},
                           {"box", BoxToJson(o.box)},
                           {"attributes", o.attributes}});
  }
  Json relationships = Json::array();
  for (const Relationship& r : graph.relationships) {
    relationships.push_back(Json{{"subject_id", r.subject_id},
                                 {"predicate", r.predicate},
                                 {"object_id", r.object_id}});
  }
  return Json{{"image_id", graph.image_id},
              {"image_width", graph.image_dims.width},
              {"image_height", graph.image_dims.height},
              {"box_format", "corners"},
              {"coordinate_scale", "normalized"},
              {"objects", std::move(objects)},
              {"relationships", std::move(relationships)}};
}

std::vector<SceneGraph> ReadSceneGraphs(std::istream& in) {
  std::vector<SceneGraph> graphs;
  ForEachJsonLine(in, [&](const Json& record, std::size_t) {
    graphs.push_back(SceneGraphFromJson(record));
  });
  return graphs;
}

SceneGraph CleanSceneGraph(const SceneGraph& graph, double iou_threshold) {
  // Same-name suppression. Nameless objects are never grouped.
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<ScoredBox>> groups;
  std::unordered_set<std::size_t> survivors;
  for (const SceneObject& o : graph.objects) {
    const std::string key = GroupKey(o);
    if (key.empty()) {
      survivors.insert(o.object_id);
      continue;
    }
    if (!groups.count(key)) group_order.push_back(key);
    groups[key].push_back({o.box, o.box.area(), o.object_id});
  }
  for (const std::string& key : group_order) {
    for (const ScoredBox& kept : Nms(groups[key], iou_threshold)) {
      survivors.insert(kept.object_id);
    }
  }

  // Cross-name suppression; same-name survivors no longer overlap at the
  // threshold, so only differently named objects are removed here.
  std::vector<ScoredBox> candidates;
  for (const SceneObject& o : graph.objects) {
    if (survivors.count(o.object_id)) {
      candidates.push_back({o.box, o.box.area(), o.object_id});
    }
  }
  const std::vector<ScoredBox> kept = Nms(candidates, iou_threshold);

  // Index survivors that still share a name, largest first.
  std::map<std::size_t, std::string> renamed;
  std::map<std::string, std::vector<std::size_t>> by_name;
  for (const ScoredBox& k : kept) {
    const SceneObject* o = graph.find(k.object_id);
    const std::string key = GroupKey(*o);
    if (!key.empty()) by_name[key].push_back(k.object_id);
  }
  for (const auto& [key, ids] : by_name) {
    if (ids.size() < 2) continue;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      renamed[ids[i]] =
          BaseName(graph.find(ids[i])->primary_name()) + "_" +
          std::to_string(i + 1);
    }
  }

  std::unordered_set<std::size_t> kept_ids;
  for (const ScoredBox& k : kept) kept_ids.insert(k.object_id);

  SceneGraph out;
  out.image_id = graph.image_id;
  out.image_dims = graph.image_dims;
  for (const SceneObject& o : graph.objects) {
    if (!kept_ids.count(o.object_id)) continue;
    SceneObject copy = o;
    if (auto it = renamed.find(o.object_id); it != renamed.end()) {
      copy.names[0] = it->second;
    }
    out.objects.push_back(std::move(copy));
  }
  for (const Relationship& r : graph.relationships) {
    if (kept_ids.count(r.subject_id) && kept_ids.count(r.object_id)) {
      out.relationships.push_back(r);
    }
  }
  return out;
}

}  // namespace mrg
