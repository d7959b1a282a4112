#include <doctest.h>

#include "smot/structured.hpp"

using namespace smot;
using nlohmann::json;

TEST_CASE("strip_code_fences") {
  CHECK(strip_code_fences("  {\"a\": 1}\n") == "{\"a\": 1}");
  CHECK(strip_code_fences("```json\n{\"a\": 1}\n```") == "{\"a\": 1}");
  CHECK(strip_code_fences("```\n[1, 2]\n```\n") == "[1, 2]");
  CHECK(strip_code_fences("plain") == "plain");
  CHECK(strip_code_fences("").empty());
}

TEST_CASE("schema subset validation") {
  const json schema = {
      {"type", "object"},
      {"required", {"name"}},
      {"properties",
       {{"name", {{"type", "string"}}},
        {"tags", {{"type", "array"}, {"items", {{"type", "string"}}}, {"minItems", 1}, {"maxItems", 2}}},
        {"mode", {{"enum", {"a", "b"}}}}}},
      {"additionalProperties", false}};
  CHECK_FALSE(validate_against_schema({{"name", "x"}}, schema));
  CHECK_FALSE(validate_against_schema({{"name", "x"}, {"tags", {"p"}}, {"mode", "b"}}, schema));

  auto err = validate_against_schema({{"tags", {"p"}}}, schema);
  REQUIRE(err);
  CHECK(err->find("name") != std::string::npos);

  err = validate_against_schema({{"name", 3}}, schema);
  REQUIRE(err);
  CHECK(err->rfind("/name", 0) == 0);

  err = validate_against_schema({{"name", "x"}, {"tags", {"p", 2}}}, schema);
  REQUIRE(err);
  CHECK(err->rfind("/tags/1", 0) == 0);

  CHECK(validate_against_schema({{"name", "x"}, {"tags", json::array()}}, schema));
  CHECK(validate_against_schema({{"name", "x"}, {"tags", {"a", "b", "c"}}}, schema));
  CHECK(validate_against_schema({{"name", "x"}, {"mode", "c"}}, schema));
  CHECK(validate_against_schema({{"name", "x"}, {"other", 1}}, schema));
  CHECK(validate_against_schema(json::array(), schema));

  const json nested = {{"type", "object"},
                       {"additionalProperties", {{"type", "array"}, {"items", {{"type", "string"}}}}}};
  CHECK_FALSE(validate_against_schema({{"ID_1", {"talk"}}}, nested));
  CHECK(validate_against_schema({{"ID_1", "talk"}}, nested));
  CHECK_FALSE(validate_against_schema(1, {{"type", {"string", "integer"}}}));
  CHECK(validate_against_schema(1.5, {{"type", "integer"}}));
}
