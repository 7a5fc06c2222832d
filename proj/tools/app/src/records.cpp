#include "furrow/app/records.hpp"

#include "furrow/error.hpp"

namespace furrow::app {

nlohmann::json model_record(std::string_view frame, const FurrowEdgeModel& model) {
  return nlohmann::json{{"frame", std::string(frame)},
                        {"a", model.a},
                        {"b", model.b},
                        {"c", model.c},
                        {"inlier_ratio", model.inlier_ratio},
                        {"candidate_count", model.candidate_count},
                        {"status", "ok"}};
}

FurrowEdgeModel model_from_record(const nlohmann::json& record) {
  try {
    FurrowEdgeModel model;
    model.a = record.at("a").get<double>();
    model.b = record.at("b").get<double>();
    model.c = record.at("c").get<double>();
    model.inlier_ratio = record.value("inlier_ratio", 0.0);
    model.candidate_count = record.value("candidate_count", std::size_t{0});
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad model record: ") + e.what());
  }
}

nlohmann::json parse_record_line(std::string_view line) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("bad JSON line: ") + e.what());
  }
}

}  // namespace furrow::app
