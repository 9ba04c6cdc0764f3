// Copyright 2026 The gkpcav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gkpcav/errors.hpp"
#include "gkpcav/io/config.hpp"
#include "gkpcav/io/output.hpp"
#include "gkpcav/io/schema.hpp"

namespace gkpcav::io {
namespace {

namespace fs = std::filesystem;

json schema_from_disk(const std::string& name) {
  return read_json_file(std::string(GKPCAV_SCHEMA_DIR) + "/" + name + ".schema.json");
}

json minimal_state() {
  return json::parse(R"({"schema_version": 1, "state": {"protocol": "cavity", "order": 1,
                         "cavity": {"c0": 200, "eta": 0.95}}})");
}

TEST(SchemaValidator, TypesAndBounds) {
  const json schema = json::parse(R"({"type": "object", "required": ["n"],
      "additionalProperties": false,
      "properties": {"n": {"type": "integer", "minimum": 1, "maximum": 3},
                     "x": {"type": "number", "exclusiveMinimum": 0},
                     "s": {"enum": ["a", "b"]},
                     "v": {"type": "array", "minItems": 2, "items": {"type": "number"}}}})");
  EXPECT_TRUE(validate(json::parse(R"({"n": 2, "x": 0.5, "s": "a", "v": [1, 2]})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 2.5})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 4})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 1, "x": 0})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 1, "s": "c"})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 1, "v": [1]})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 1, "v": [1, "a"]})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"x": 1})"), schema).empty());
  const auto errs = validate(json::parse(R"({"n": 1, "extra": true})"), schema);
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_NE(errs.front().find("extra"), std::string::npos);
}

TEST(SchemaValidator, RefsAndOneOf) {
  const json schema = json::parse(R"({"properties": {"a": {"$ref": "#/definitions/pos"},
      "b": {"oneOf": [{"type": "string"}, {"type": "integer"}]}},
      "definitions": {"pos": {"type": "number", "minimum": 0}}})");
  EXPECT_TRUE(validate(json::parse(R"({"a": 1, "b": "x"})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"a": -1})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"b": 1.5})"), schema).empty());
}

TEST(SchemaValidator, ShippedSchemasAreSelfConsistent) {
  for (const char* name : {"experiment_config", "sweep_metadata", "state_report", "verify_report"}) {
    const json s = schema_from_disk(name);
    EXPECT_TRUE(s.contains("properties")) << name;
    EXPECT_EQ(s["properties"]["schema_version"]["const"], 1) << name;
  }
}

TEST(ConfigParse, ExampleConfigsParse) {
  const json schema = schema_from_disk("experiment_config");
  int count = 0;
  for (const auto& entry : fs::directory_iterator(GKPCAV_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_config(read_json_file(entry.path().string()), schema)) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST(ConfigParse, Defaults) {
  const ExperimentConfig cfg = parse_config(minimal_state(), schema_from_disk("experiment_config"));
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_EQ(cfg.dim_cap, 256);
  EXPECT_EQ(cfg.output_prefix(), "experiment");
  ASSERT_TRUE(cfg.state.has_value());
  EXPECT_FALSE(cfg.sweep.has_value());
  EXPECT_NEAR(cfg.state->cavity.params().cooperativity(), 10.0, 1e-9);
}

TEST(ConfigParse, Rejections) {
  const json schema = schema_from_disk("experiment_config");
  auto rejects = [&](const std::function<void(json&)>& edit) {
    json doc = minimal_state();
    edit(doc);
    EXPECT_THROW(parse_config(doc, schema), ConfigError) << doc.dump();
  };
  rejects([](json& d) { d["bogus"] = 1; });
  rejects([](json& d) { d["schema_version"] = 2; });
  rejects([](json& d) { d.erase("state"); });
  rejects([](json& d) { d["state"]["cavity"] = json::object(); });
  rejects([](json& d) { d["state"]["cavity"] = {{"c0", 100}}; });
  rejects([](json& d) { d["state"]["cavity"] = {{"c0", 100}, {"c", 5}, {"eta", 0.9}}; });
  rejects([](json& d) { d["state"]["cavity"]["eta"] = 1.0; });
  rejects([](json& d) { d["state"]["cavity"] = {{"c", 5}, {"eta", 0.9}}; d["state"]["optimize"] = json::object(); });
  rejects([](json& d) { d["state"]["wigner"] = {{"x_range", {2, -2}}}; });
  rejects([](json& d) {
    d["sweep"] = {{"protocol", "cavity"}, {"orders", {1}}, {"c0", {100}},
                  {"variants", {{{"name", "a"}}, {{"name", "a"}}}}};
  });
  rejects([](json& d) {
    d["sweep"] = {{"protocol", "cavity"}, {"orders", {1}}, {"c0", {100}},
                  {"space", {{"r", {1.5, 0.5}}}}};
  });
}

TEST(ConfigParse, ReadErrors) {
  EXPECT_THROW(read_json_file("/nonexistent/gkpcav.json"), ConfigError);
  const fs::path p = fs::temp_directory_path() / "gkpcav_bad_config.json";
  std::ofstream(p) << "{ not json";
  EXPECT_THROW(read_json_file(p.string()), ConfigError);
  fs::remove(p);
}

TEST(Output, NumberFormatting) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(200.0), "200");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_TRUE(number_or_null(std::nan("")).is_null());
  EXPECT_EQ(number_or_null(2.0), json(2.0));
}

TEST(Output, CsvTable) {
  CsvTable t({"a", "b"});
  EXPECT_EQ(t.str(), "a,b\n");
  t.add_row({1.0, 2.5});
  EXPECT_EQ(t.str(), "a,b\n1,2.5\n");
  EXPECT_EQ(t.rows(), 1u);
  EXPECT_THROW(t.add_row({1.0}), InvalidArgument);
}

TEST(Output, AtomicWriteCreatesDirectories) {
  const fs::path dir = fs::temp_directory_path() / "gkpcav_io_test" / "nested";
  fs::remove_all(dir.parent_path());
  write_file_atomic(dir / "x.csv", "a\n1\n");
  write_json_atomic(dir / "x.json", json{{"k", 1}});
  std::ifstream in(dir / "x.csv");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(content, "a\n1\n");
  EXPECT_EQ(read_json_file((dir / "x.json").string())["k"], 1);
  for (const auto& e : fs::directory_iterator(dir)) {
    EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos) << e.path();
  }
  fs::remove_all(dir.parent_path());
}

}  // namespace
}  // namespace gkpcav::io
