// Copyright 2026 The varmark Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "varmark/synth/java_synth.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string_view>

#include "varmark/common/rng.hpp"

namespace varmark::synth {

namespace {

const std::map<std::string, std::vector<std::string>, std::less<>>& Pools() {
  static const std::map<std::string, std::vector<std::string>, std::less<>> pools = {
      {"idx", {"i", "j", "k", "idx", "index", "pos", "cur", "currentIndex", "position", "n"}},
      {"count", {"count", "cnt", "counter", "num", "numItems", "itemCount", "matches", "hits", "total", "occurrences"}},
      {"sum", {"sum", "total", "acc", "result", "score", "accum", "runningTotal", "totalSum", "value"}},
      {"max", {"max", "best", "largest", "maxValue", "top", "highest", "maxVal", "result", "peak"}},
      {"min", {"min", "smallest", "minValue", "lowest", "least", "minVal", "result", "floor"}},
      {"str", {"name", "text", "str", "s", "line", "msg", "message", "label", "value", "word", "input", "content"}},
      {"list", {"items", "list", "values", "elements", "names", "result", "lines", "words", "entries", "output", "resultList", "collected"}},
      {"map", {"map", "counts", "cache", "lookup", "table", "freq", "frequencies", "wordCounts", "countMap", "histogram"}},
      {"file", {"file", "dir", "directory", "f", "folder", "target", "dest", "outputDir", "baseDir", "root"}},
      {"sb", {"sb", "builder", "buf", "buffer", "out", "result", "joined", "stringBuilder", "text"}},
      {"flag", {"found", "done", "ok", "valid", "flag", "success", "changed", "matched", "present", "hit"}},
      {"first", {"first", "isFirst", "start", "leading", "initial", "firstItem"}},
      {"item", {"item", "s", "e", "elem", "element", "word", "line", "entry", "str", "part", "token", "value"}},
      {"arr", {"arr", "array", "nums", "data", "values", "a", "numbers", "input", "items", "elements"}},
      {"tmp", {"tmp", "temp", "t", "swap", "saved", "old", "held"}},
      {"ex", {"e", "ex", "err", "exception", "ignored", "cause"}},
      {"reader", {"reader", "br", "in", "input", "bufferedReader", "r", "lineReader"}},
      {"chr", {"c", "ch", "chr", "current", "letter", "symbol"}},
      {"key", {"target", "key", "needle", "query", "search", "wanted", "expected", "pattern"}},
      {"path", {"path", "fileName", "name", "location", "filePath", "dirName", "pathName", "uri"}},
      {"sep", {"sep", "separator", "delimiter", "delim", "glue", "joiner"}},
      {"limit", {"limit", "max", "bound", "threshold", "cap", "maxCount", "upper"}},
      {"size", {"size", "len", "length", "n", "count", "total", "width"}},
      {"num", {"num", "n", "x", "value", "number", "val", "amount", "input"}},
      {"avg", {"avg", "average", "mean", "result", "ratio"}},
      {"left", {"left", "lo", "low", "start", "begin", "head"}},
      {"right", {"right", "hi", "high", "end", "last", "tail"}},
      {"row", {"row", "r", "i", "y", "line"}},
      {"col", {"col", "c", "j", "x", "column"}},
      {"grid", {"grid", "matrix", "table", "board", "cells", "m"}},
      {"code", {"code", "mode", "status", "kind", "level", "type", "option", "state"}},
      {"label", {"label", "name", "result", "text", "desc", "description", "title"}},
      {"next", {"next", "sum", "tmp", "following", "fib", "c"}},
      {"prev", {"a", "prev", "previous", "first", "x", "older"}},
      {"curr", {"b", "curr", "current", "second", "y", "newer"}},
      {"parsed", {"parsed", "result", "value", "number", "n", "num", "converted"}},
      {"fallback", {"fallback", "defaultValue", "def", "otherwise", "dflt", "orElse"}},
      {"src", {"src", "source", "from", "input", "original", "in"}},
      {"dst", {"dest", "dst", "target", "to", "output", "copy"}},
      {"stream", {"in", "input", "is", "stream", "inStream", "source"}},
      {"ostream", {"out", "output", "os", "sink", "outStream", "target"}},
      {"bytes", {"buffer", "buf", "bytes", "chunk", "block", "data"}},
      {"read", {"len", "read", "n", "count", "bytesRead", "num"}},
      {"words", {"words", "parts", "tokens", "pieces", "fields", "chunks"}},
      {"chars", {"chars", "letters", "arr", "buf", "characters", "data"}},
      {"step", {"step", "delta", "inc", "stride", "offset"}},
      {"factor", {"factor", "scale", "multiplier", "weight", "coef", "k"}},
      {"product", {"product", "result", "acc", "prod", "value", "total"}},
      {"user", {"user", "person", "account", "member", "owner", "customer"}},
      {"users", {"users", "people", "accounts", "members", "owners", "customers"}},
      {"id", {"id", "userId", "key", "uid", "identifier", "accountId"}},
      {"day", {"day", "weekday", "dayOfWeek", "d", "dayIndex", "dow"}},
  };
  return pools;
}

const std::vector<std::string>& Methods(std::string_view kind) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> methods = {
      {"sum", {"sumArray", "total", "computeSum", "sumOf", "addAll", "accumulate"}},
      {"count", {"countMatches", "countOccurrences", "occurrences", "frequency", "tally"}},
      {"mkdir", {"createDir", "ensureDir", "makeDirectory", "prepareDir", "mkdirIfMissing"}},
      {"join", {"join", "joinAll", "concat", "mkString", "implode"}},
      {"freq", {"wordFrequencies", "countWords", "histogram", "tokenCounts", "frequencies"}},
      {"max", {"findMax", "max", "largest", "maxOf", "peak"}},
      {"min", {"findMin", "min", "smallest", "minOf", "lowest"}},
      {"read", {"readLines", "loadLines", "readAll", "linesOf", "slurp"}},
      {"describe", {"describe", "labelFor", "levelName", "nameOf", "toLabel"}},
      {"contains", {"contains", "has", "includes", "find", "exists"}},
      {"reverse", {"reverse", "reversed", "flip", "mirror", "backwards"}},
      {"avg", {"average", "mean", "avg", "computeMean", "meanOf"}},
      {"filter", {"filterShort", "keepLong", "select", "filter", "longWords"}},
      {"parse", {"parseOr", "toInt", "parseIntSafe", "tryParse", "asInt"}},
      {"copy", {"copyFile", "copy", "transfer", "duplicate", "clone"}},
      {"fib", {"fibonacci", "fib", "nthFib", "fibAt", "sequence"}},
      {"grid", {"sumGrid", "gridTotal", "matrixSum", "totalCells", "sumCells"}},
      {"day", {"dayName", "weekdayName", "nameOfDay", "dayLabel", "toDayName"}},
      {"chars", {"countChar", "occurrencesOf", "charCount", "countLetter", "tallyChar"}},
      {"scale", {"scaleAll", "multiplyAll", "scaled", "applyFactor", "rescale"}},
      {"product", {"product", "multiply", "productOf", "mulAll", "factorial"}},
      {"lookup", {"findUser", "lookupUser", "userById", "getUser", "byId"}},
      {"upper", {"toUpperAll", "upperCase", "shout", "capitalizeAll", "normalize"}},
      {"index", {"indexOf", "find", "search", "locate", "position"}},
  };
  return methods.at(std::string(kind));
}

struct Template {
  std::string method_kind;
  std::string text;
};

// Placeholders: {role} is a variable chosen from the role's pool (distinct
// within a function); {@} is the method name; {?a|b|c} picks one alternative;
// {+x} is an increment statement of the variable bound to role x; {-x} a
// decrement; {L} an optional logging statement.
const std::vector<Template>& Templates() {
  static const std::vector<Template> templates = {
      {"sum",
       "public static int {@}(int[] {arr}) {\n"
       "  int {sum} = 0;\n"
       "  {?for (int {idx} = 0; {idx} < {arr}.length; {+idx}) {\n    {sum} += {arr}[{idx}];\n  }"
       "|for (int {item} : {arr}) {\n    {sum} += {item};\n  }"
       "|int {idx} = 0;\n  while ({idx} < {arr}.length) {\n    {sum} += {arr}[{idx}];\n    {+idx};\n  }}\n"
       "  {L}return {sum};\n}\n"},
      {"count",
       "public int {@}(List<String> {list}, String {key}) {\n"
       "  {?if ({list} == null) {\n    return 0;\n  }\n  |}int {count} = 0;\n"
       "  for (String {item} : {list}) {\n"
       "    if ({item}.equals({key})) {\n      {+count};\n    }\n  }\n"
       "  {L}return {count};\n}\n"},
      {"mkdir",
       "public static File {@}(String {path}) {\n"
       "  File {file} = new File({path});\n"
       "  if (!{file}.exists()) {\n    {file}.mkdirs();\n  }\n"
       "  {?{L}|}return {file};\n}\n"},
      {"join",
       "public static String {@}(List<String> {list}, String {sep}) {\n"
       "  StringBuilder {sb} = new StringBuilder();\n"
       "  boolean {first} = true;\n"
       "  for (String {item} : {list}) {\n"
       "    if (!{first}) {\n      {sb}.append({sep});\n    }\n"
       "    {sb}.append({item});\n    {first} = false;\n  }\n"
       "  return {sb}.toString();\n}\n"},
      {"freq",
       "public Map<String, Integer> {@}(String {str}) {\n"
       "  Map<String, Integer> {map} = new HashMap<>();\n"
       "  String[] {words} = {str}.split(\" \");\n"
       "  for (String {item} : {words}) {\n"
       "    {?{map}.put({item}, {map}.getOrDefault({item}, 0) + 1);"
       "|int {count} = {map}.getOrDefault({item}, 0);\n    {map}.put({item}, {count} + 1);}\n  }\n"
       "  {L}return {map};\n}\n"},
      {"max",
       "public static int {@}(int[] {arr}) {\n"
       "  int {max} = {arr}[0];\n"
       "  for (int {idx} = 1; {idx} < {arr}.length; {+idx}) {\n"
       "    if ({arr}[{idx}] > {max}) {\n      {max} = {arr}[{idx}];\n    }\n  }\n"
       "  {L}return {max};\n}\n"},
      {"min",
       "public static double {@}(List<Double> {list}) {\n"
       "  double {min} = Double.MAX_VALUE;\n"
       "  for (double {num} : {list}) {\n"
       "    {?if ({num} < {min}) {\n      {min} = {num};\n    }|{min} = Math.min({min}, {num});}\n  }\n"
       "  return {min};\n}\n"},
      {"read",
       "public List<String> {@}(String {path}) throws IOException {\n"
       "  List<String> {list} = new ArrayList<>();\n"
       "  try (BufferedReader {reader} = new BufferedReader(new FileReader({path}))) {\n"
       "    String {str};\n"
       "    while (({str} = {reader}.readLine()) != null) {\n"
       "      {?{list}.add({str}.trim());|if (!{str}.isEmpty()) {\n        {list}.add({str});\n      }}\n    }\n  }\n"
       "  return {list};\n}\n"},
      {"describe",
       "public String {@}(int {code}) {\n"
       "  String {label};\n"
       "  if ({code} == 1) {\n    {label} = \"low\";\n  } else if ({code} == 2) {\n    {label} = \"medium\";\n"
       "  } else if ({code} == 3) {\n    {label} = \"high\";\n  } else {\n    {label} = \"unknown\";\n  }\n"
       "  {L}return {label};\n}\n"},
      {"contains",
       "public boolean {@}(int[] {arr}, int {key}) {\n"
       "  boolean {flag} = false;\n"
       "  int {idx} = 0;\n"
       "  while ({idx} < {arr}.length && !{flag}) {\n"
       "    if ({arr}[{idx}] == {key}) {\n      {flag} = true;\n    }\n    {+idx};\n  }\n"
       "  return {flag};\n}\n"},
      {"reverse",
       "public static String {@}(String {str}) {\n"
       "  char[] {chars} = {str}.toCharArray();\n"
       "  int {left} = 0, {right} = {chars}.length - 1;\n"
       "  while ({left} < {right}) {\n"
       "    char {tmp} = {chars}[{left}];\n    {chars}[{left}] = {chars}[{right}];\n"
       "    {chars}[{right}] = {tmp};\n    {+left};\n    {-right};\n  }\n"
       "  return new String({chars});\n}\n"},
      {"avg",
       "public double {@}(List<Integer> {list}) {\n"
       "  if ({list}.isEmpty()) {\n    return 0.0;\n  }\n"
       "  double {sum} = 0;\n"
       "  for (int {num} : {list}) {\n    {sum} += {num};\n  }\n"
       "  {?return {sum} / {list}.size();|double {avg} = {sum} / {list}.size();\n  {L}return {avg};}\n}\n"},
      {"filter",
       "public List<String> {@}(List<String> {list}, int {limit}) {\n"
       "  List<String> {words} = new ArrayList<>();\n"
       "  for (String {item} : {list}) {\n"
       "    {?if ({item} != null) {\n      if ({item}.length() >= {limit}) {\n        {words}.add({item});\n      }\n    }"
       "|if ({item} != null && {item}.length() >= {limit}) {\n      {words}.add({item});\n    }}\n  }\n"
       "  return {words};\n}\n"},
      {"parse",
       "public static int {@}(String {str}, int {fallback}) {\n"
       "  try {\n    int {parsed} = Integer.parseInt({str}.trim());\n    return {parsed};\n"
       "  } catch (NumberFormatException {ex}) {\n    {?{L}|}return {fallback};\n  }\n}\n"},
      {"copy",
       "public void {@}(File {src}, File {dst}) throws IOException {\n"
       "  byte[] {bytes} = new byte[4096];\n"
       "  try (InputStream {stream} = new FileInputStream({src}); OutputStream {ostream} = new FileOutputStream({dst})) {\n"
       "    int {read};\n"
       "    while (({read} = {stream}.read({bytes})) > 0) {\n      {ostream}.write({bytes}, 0, {read});\n    }\n  }\n}\n"},
      {"fib",
       "public static long {@}(int {num}) {\n"
       "  long {prev} = 0, {curr} = 1;\n"
       "  for (int {idx} = 0; {idx} < {num}; {+idx}) {\n"
       "    long {next} = {prev} + {curr};\n    {prev} = {curr};\n    {curr} = {next};\n  }\n"
       "  return {prev};\n}\n"},
      {"grid",
       "public int {@}(int[][] {grid}) {\n"
       "  int {sum} = 0;\n"
       "  for (int {row} = 0; {row} < {grid}.length; {+row}) {\n"
       "    for (int {col} = 0; {col} < {grid}[{row}].length; {+col}) {\n"
       "      {sum} += {grid}[{row}][{col}];\n    }\n  }\n"
       "  {L}return {sum};\n}\n"},
      {"day",
       "public static String {@}(int {day}) {\n"
       "  String {label} = \"\";\n"
       "  switch ({day}) {\n"
       "    case 0:\n      {label} = \"Sunday\";\n      break;\n"
       "    case 1:\n      {label} = \"Monday\";\n      break;\n"
       "    case 2:\n      {label} = \"Tuesday\";\n      break;\n"
       "    default:\n      {label} = \"Other\";\n      break;\n  }\n"
       "  return {label};\n}\n"},
      {"chars",
       "public int {@}(String {str}, char {chr}) {\n"
       "  int {count} = 0;\n"
       "  {?for (int {idx} = 0; {idx} < {str}.length(); {+idx}) {\n    if ({str}.charAt({idx}) == {chr}) {\n      {+count};\n    }\n  }"
       "|for (char {item} : {str}.toCharArray()) {\n    if ({item} == {chr}) {\n      {+count};\n    }\n  }}\n"
       "  return {count};\n}\n"},
      {"scale",
       "public static double[] {@}(double[] {arr}, double {factor}) {\n"
       "  double[] {list} = new double[{arr}.length];\n"
       "  for (int {idx} = 0; {idx} < {arr}.length; {+idx}) {\n"
       "    {list}[{idx}] = {arr}[{idx}] * {factor};\n  }\n"
       "  {L}return {list};\n}\n"},
      {"product",
       "public static long {@}(int {num}) {\n"
       "  long {product} = 1;\n"
       "  {?for (int {idx} = 2; {idx} <= {num}; {+idx}) {\n    {product} *= {idx};\n  }"
       "|int {idx} = 2;\n  while ({idx} <= {num}) {\n    {product} *= {idx};\n    {+idx};\n  }}\n"
       "  return {product};\n}\n"},
      {"lookup",
       "public User {@}(List<User> {users}, String {id}) {\n"
       "  for (User {user} : {users}) {\n"
       "    if ({user}.getId().equals({id})) {\n      {?{L}|}return {user};\n    }\n  }\n"
       "  return null;\n}\n"},
      {"upper",
       "public List<String> {@}(List<String> {list}) {\n"
       "  List<String> {words} = new ArrayList<>({list}.size());\n"
       "  for (String {item} : {list}) {\n    {words}.add({item}.toUpperCase());\n  }\n"
       "  return {words};\n}\n"},
      {"index",
       "public static int {@}(int[] {arr}, int {key}) {\n"
       "  int {left} = 0;\n  int {right} = {arr}.length - 1;\n"
       "  while ({left} <= {right}) {\n"
       "    int {idx} = ({left} + {right}) / 2;\n"
       "    if ({arr}[{idx}] == {key}) {\n      return {idx};\n    } else if ({arr}[{idx}] < {key}) {\n"
       "      {left} = {idx} + 1;\n    } else {\n      {right} = {idx} - 1;\n    }\n  }\n"
       "  return -1;\n}\n"},
  };
  return templates;
}

class Expander {
 public:
  Expander(Rng& rng, std::string method) : rng_(rng), method_(std::move(method)) {}

  std::string Expand(std::string_view text) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] != '{') {
        out += text[i++];
        continue;
      }
      const std::size_t close = MatchBrace(text, i);
      const std::string_view body = text.substr(i + 1, close - i - 1);
      i = close + 1;
      if (body.empty()) {
        out += "{}";
      } else if (body[0] == '?') {
        const auto alts = SplitAlternatives(body.substr(1));
        out += Expand(alts[rng_.Index(alts.size())]);
      } else if (body == "@") {
        out += method_;
      } else if (body == "L") {
        if (rng_.Bernoulli(0.5)) {
          static const std::vector<std::string> msgs = {"done", "finished", "result", "ok", "complete"};
          out += "System.out.println(\"" + rng_.Pick(msgs) + "\");\n  ";
        }
      } else if (body[0] == '+' || body[0] == '-') {
        const std::string v = Name(body.substr(1));
        const std::string op = body[0] == '+' ? "+" : "-";
        switch (rng_.Index(4)) {
          case 0: out += v + op + op; break;
          case 1: out += op + op + v; break;
          case 2: out += v + " " + op + "= 1"; break;
          default: out += v + " = " + v + " " + op + " 1"; break;
        }
      } else if (IsRole(body)) {
        out += Name(body);
      } else {
        // A literal brace block: re-emit and expand its contents.
        out += '{';
        out += Expand(body);
        out += '}';
      }
    }
    return out;
  }

 private:
  static std::size_t MatchBrace(std::string_view text, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
      if (text[i] == '{') ++depth;
      if (text[i] == '}' && --depth == 0) return i;
    }
    return text.size() - 1;
  }

  static std::vector<std::string_view> SplitAlternatives(std::string_view body) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '{') ++depth;
      if (body[i] == '}') --depth;
      if (body[i] == '|' && depth == 0 && !(i + 1 < body.size() && body[i + 1] == '|') &&
          !(i > 0 && body[i - 1] == '|')) {
        out.push_back(body.substr(start, i - start));
        start = i + 1;
      }
    }
    out.push_back(body.substr(start));
    return out;
  }

  static bool IsRole(std::string_view s) { return Pools().find(s) != Pools().end(); }

  // Earlier pool entries are the conventional names; rank r has weight
  // (r + 1)^-1.5, so the first name of a ten-name pool is drawn about half
  // the time.
  const std::string& Zipf(const std::vector<std::string>& names) {
    double total = 0.0;
    for (std::size_t r = 0; r < names.size(); ++r) total += std::pow(static_cast<double>(r + 1), -1.5);
    double u = rng_.Uniform() * total;
    for (std::size_t r = 0; r < names.size(); ++r) {
      u -= std::pow(static_cast<double>(r + 1), -1.5);
      if (u < 0.0) return names[r];
    }
    return names.back();
  }

  std::string Name(std::string_view role) {
    const auto it = bound_.find(std::string(role));
    if (it != bound_.end()) return it->second;
    const auto& pool = Pools().find(role)->second;
    std::vector<std::string> free;
    for (const std::string& n : pool) {
      if (used_.count(n) == 0 && n != method_) free.push_back(n);
    }
    std::string name = free.empty() ? std::string(role) + std::to_string(used_.size()) : Zipf(free);
    used_.insert(name);
    bound_.emplace(std::string(role), name);
    return name;
  }

  Rng& rng_;
  std::string method_;
  std::map<std::string, std::string> bound_;
  std::set<std::string> used_;
};

}  // namespace

std::vector<lang::CorpusEntry> GenerateJavaCorpus(std::size_t count, std::uint64_t seed) {
  std::vector<lang::CorpusEntry> out;
  out.reserve(count);
  const auto& templates = Templates();
  for (std::size_t n = 0; n < count; ++n) {
    Rng rng(DeriveSeed(seed, {n}));
    const Template& t = templates[rng.Index(templates.size())];
    Expander expander(rng, rng.Pick(Methods(t.method_kind)));
    out.push_back(lang::CorpusEntry{"synth-" + std::to_string(n), expander.Expand(t.text), "java"});
  }
  return out;
}

std::string CreateDirExample() {
  return "public static File createDir(String path) {\n"
         "  File dir = new File(path);\n"
         "  if (!dir.exists()) {\n"
         "    dir.mkdirs();\n"
         "  }\n"
         "  return dir;\n"
         "}\n";
}

}  // namespace varmark::synth
