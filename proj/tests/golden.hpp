#pragma once
// Benchmark runs with stored JSON reports under corpus/golden/.

#include <string>
#include <vector>

namespace golden {

struct Run {
  std::string name;  // corpus/golden/<name>.json
  std::string file;  // corpus program
  std::vector<std::string> queries;
  std::string domain = "card";
  bool arith = true;
};

inline const std::vector<Run>& runs() {
  static const std::vector<Run> r = {
      {"is_last", "is_last.pl", {"is_last(v,g)", "is_last(g,v)"}},
      {"repeat", "repeat.pl", {"repeat"}},
      {"repeat_sahlin", "repeat.pl", {"repeat"}, "sahlin"},
      {"pq_cut", "pq_cut.pl", {"p(v)", "p(g)", "q(v)"}},
      {"pq_cut_sahlin", "pq_cut.pl", {"p(v)", "q(v)"}, "sahlin"},
      {"partition1", "partition1.pl", {"partition(g,g,v,v)"}},
      {"partition2", "partition2.pl", {"partition(g,g,v,v)"}},
      {"partition2_noarith", "partition2.pl", {"partition(g,g,v,v)"}, "card", false},
      {"compress_vg", "compress.pl", {"compress(v,g)"}},
      {"compress_both", "compress.pl", {"compress(v,g)", "compress(g,v)"}},
      {"qsort", "qsort.pl", {"qsort(g,v)"}},
      {"qsort_noarith", "qsort.pl", {"qsort(g,v)"}, "card", false},
      {"append", "append.pl", {"app(g,g,v)", "app(v,v,g)"}},
      {"nrev", "nrev.pl", {"nrev(g,v)"}},
      {"member", "member.pl", {"memberchk(v,g)"}},
      {"max", "max.pl", {"max_list(g,v)"}},
      {"fact", "fact.pl", {"fact(g,v)"}},
      {"perm", "perm.pl", {"perm(g,v)"}},
      {"perm_sahlin", "perm.pl", {"perm(g,v)"}, "sahlin"},
  };
  return r;
}

// Arguments for the analyze front end, run from the corpus directory.
inline std::string cli_args(const Run& r) {
  std::string a = r.file;
  for (const auto& q : r.queries) a += " --query '" + q + "'";
  a += " --domain " + r.domain;
  if (!r.arith) a += " --no-arith";
  return a + " --format json";
}

}  // namespace golden
