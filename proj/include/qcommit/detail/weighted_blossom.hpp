#pragma once

// Maximum-weight matching on general graphs with integer weights, O(n^3).
// Primal-dual blossom algorithm (Edmonds / Galil), following the well-known
// structure of Joris van Rantwijk's reference implementation. Dual variables
// are stored doubled so integer weights keep every quantity integral.

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

namespace qc::detail {

template <typename W>
struct WeightedEdge {
  int i;
  int j;
  W w;
};

template <typename W>
class WeightedBlossom {
 public:
  WeightedBlossom() = default;
  WeightedBlossom(int nvertex, std::vector<WeightedEdge<W>> edges) { reset(nvertex, std::move(edges)); }

  /// Loads a new problem; buffers from earlier solves are reused.
  void reset(int nvertex, std::vector<WeightedEdge<W>> edges) {
    n_ = nvertex;
    edges_ = std::move(edges);
  }

  /// Edge buffer, for callers that fill it in place before reset().
  std::vector<WeightedEdge<W>> take_edges() {
    std::vector<WeightedEdge<W>> e = std::move(edges_);
    e.clear();
    return e;
  }

  /// mate[v] = partner vertex or -1.
  std::vector<int> solve() {
    W maxweight = 0;
    for (auto& e : edges_) maxweight = std::max(maxweight, e.w);
    return solve(std::vector<int>(static_cast<std::size_t>(n_), -1), std::vector<W>(static_cast<std::size_t>(n_), maxweight));
  }

  /// Warm start from a matching of tight edges and dual values that are
  /// feasible (dual[i] + dual[j] >= 2 w for every edge). Exposed vertices may
  /// carry any nonnegative dual; those at zero already satisfy optimality.
  std::vector<int> solve(const std::vector<int>& init_mate, const std::vector<W>& init_dual) {
    const int nedge = static_cast<int>(edges_.size());
    if (nedge == 0 || n_ == 0) return std::vector<int>(static_cast<std::size_t>(n_), -1);
    build_incidence();
    mate_.assign(n_, -1);
    for (int v = 0; v < n_; ++v) {
      const int w = init_mate[v];
      if (w < 0) continue;
      for (int p : neighbours(v))
        if (endpoint_[p] == w) mate_[v] = p;
      assert(mate_[v] >= 0);
    }
    init_structures();
    for (int v = 0; v < n_; ++v) dualvar_[v] = init_dual[v];
    run();
    std::vector<int> out(static_cast<std::size_t>(n_), -1);
    for (int v = 0; v < n_; ++v)
      if (mate_[v] >= 0) out[v] = endpoint_[mate_[v]];
    return out;
  }

  /// Fixes the graph for a series of solve_alive() calls.
  void load(int nvertex, std::vector<WeightedEdge<W>> edges) {
    reset(nvertex, std::move(edges));
    build_incidence();
    solved_ = false;
  }

  /// Edge mask for solve_alive(); load() starts with every edge alive.
  void set_alive(int k, bool on) {
    if (static_cast<bool>(alive_[k]) == on) return;
    alive_[k] = on;
    const int d = on ? 1 : -1;
    deg_[edges_[k].i] += d;
    deg_[edges_[k].j] += d;
  }

  /// Solves on the alive edges. With warm, the previous solution is the
  /// starting point; the caller guarantees edges were only disabled since.
  /// Returns mate endpoints: edge mate[v] / 2 covers v.
  const std::vector<int>& solve_alive(bool warm) {
    if (warm && solved_) {
      flatten_into(ybuf_);
      for (int v = 0; v < n_; ++v) {
        const int p = mate_[v];
        if (p < 0) continue;
        const int k = p >> 1;
        if (!alive_[k] || ybuf_[edges_[k].i] + ybuf_[edges_[k].j] != 2 * edges_[k].w) mate_[v] = -1;
      }
    } else {
      W maxweight = 0;
      for (std::size_t k = 0; k < edges_.size(); ++k)
        if (alive_[k]) maxweight = std::max(maxweight, edges_[k].w);
      mate_.assign(n_, -1);
      ybuf_.assign(n_, maxweight);
    }
    init_structures();
    // a vertex without edges is optimal at dual zero
    for (int v = 0; v < n_; ++v) dualvar_[v] = deg_[v] ? ybuf_[v] : 0;
    run();
    solved_ = true;
    return mate_;
  }

  const std::vector<WeightedEdge<W>>& edges() const { return edges_; }

 /// Vertex duals after solve() with every blossom dual pushed down to its
  /// vertices. Together with the matching they stay feasible and tight for
  /// any subgraph, which is what a later warm start needs.
  std::vector<W> flattened_duals() const {
    std::vector<W> y;
    flatten_into(y);
    return y;
  }

 private:
  void flatten_into(std::vector<W>& y) const {
    y.assign(static_cast<std::size_t>(n_), 0);
    if (dualvar_.empty()) return;
    for (int v = 0; v < n_; ++v) {
      W s = dualvar_[v];
      for (int b = blossomparent_[v]; b != -1; b = blossomparent_[b]) s += dualvar_[b];
      y[v] = s;
    }
  }

  void build_incidence() {
    const int nedge = static_cast<int>(edges_.size());
    endpoint_.resize(2 * static_cast<std::size_t>(nedge));
    for (int k = 0; k < nedge; ++k) {
      endpoint_[2 * k] = edges_[k].i;
      endpoint_[2 * k + 1] = edges_[k].j;
    }
    // incidence in CSR form: endpoints of the far ends, grouped by vertex
    nb_off_.assign(n_ + 1, 0);
    for (int k = 0; k < nedge; ++k) {
      ++nb_off_[edges_[k].i + 1];
      ++nb_off_[edges_[k].j + 1];
    }
    for (int v = 0; v < n_; ++v) nb_off_[v + 1] += nb_off_[v];
    nb_.resize(2 * static_cast<std::size_t>(nedge));
    fill_.assign(nb_off_.begin(), nb_off_.end() - 1);
    for (int k = 0; k < nedge; ++k) {
      nb_[fill_[edges_[k].i]++] = 2 * k + 1;
      nb_[fill_[edges_[k].j]++] = 2 * k;
    }
    alive_.assign(edges_.size(), 1);
    deg_.resize(n_);
    for (int v = 0; v < n_; ++v) deg_[v] = nb_off_[v + 1] - nb_off_[v];
  }

  // Everything but mate_ and the vertex duals.
  void init_structures() {
    const int n2 = 2 * n_;
    label_.assign(n2, 0);
    labelend_.assign(n2, -1);
    inblossom_.resize(n_);
    for (int v = 0; v < n_; ++v) inblossom_[v] = v;
    blossomparent_.assign(n2, -1);
    clear_lists(blossomchilds_, n2);
    blossombase_.assign(n2, -1);
    for (int v = 0; v < n_; ++v) blossombase_[v] = v;
    clear_lists(blossomendps_, n2);
    bestedge_.assign(n2, -1);
    clear_lists(blossombestedges_, n2);
    has_bestedges_.assign(n2, 0);
    unusedblossoms_.clear();
    for (int b = n2 - 1; b >= n_; --b) unusedblossoms_.push_back(b);
    bhi_ = n_;
    dualvar_.assign(n2, 0);
    allowedge_.assign(edges_.size(), 0);
    active_.clear();
    for (int v = 0; v < n_; ++v)
      if (deg_[v] > 0) active_.push_back(v);
  }

  void run() {
    const int n2 = 2 * n_;
    // Every stage matches at least one exposed vertex of positive dual.
    for (int stage = 0;; ++stage) {
      if (stage > n_) throw std::logic_error("weighted matching did not converge");
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (int b = n_; b < bhi_; ++b) {
        blossombestedges_[b].clear();
        has_bestedges_[b] = 0;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), 0);
      queue_.clear();

      bool any_root = false;
      for (int v : active_)
        if (mate_[v] == -1 && dualvar_[v] > 0 && label_[inblossom_[v]] == 0) {
          assign_label(v, 1, -1);
          any_root = true;
        }
      if (!any_root) break;

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          int v = queue_.back();
          queue_.pop_back();
          assert(label_[inblossom_[v]] == 1);
          for (int p : neighbours(v)) {
            int k = p >> 1;
            if (!alive_[k]) continue;
            int w = endpoint_[p];
            if (inblossom_[v] == inblossom_[w]) continue;
            W kslack = 0;
            if (!allowedge_[k]) {
              kslack = slack(k);
              if (kslack <= 0) allowedge_[k] = 1;
            }
            if (allowedge_[k]) {
              if (label_[inblossom_[w]] == 0 && mate_[blossombase_[inblossom_[w]]] == -1) {
                // exposed vertex with zero dual: augment into it
                augment_side(v, p);
                if (inblossom_[w] >= n_) augment_blossom(inblossom_[w], w);
                mate_[w] = p ^ 1;
                augmented = true;
                break;
              } else if (label_[inblossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[inblossom_[w]] == 1) {
                int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                label_[w] = 2;
                labelend_[w] = p ^ 1;
              }
            } else if (label_[inblossom_[w]] == 1) {
              int b = inblossom_[v];
              if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
            } else if (label_[w] == 0) {
              if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
            }
          }
        }
        if (augmented) break;

        int deltatype = -1;
        W delta = 0;
        int deltavertex = -1;
        for (int v : active_)
          if (label_[inblossom_[v]] == 1 && (deltatype == -1 || dualvar_[v] < delta)) {
            delta = dualvar_[v];
            deltatype = 1;
            deltavertex = v;
          }
        int deltaedge = -1;
        int deltablossom = -1;
        for (int v : active_) {
          if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
            W d = slack(bestedge_[v]);
            if (d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[v];
            }
          }
        }
        auto delta3 = [&](int b) {
          if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
            W d = slack(bestedge_[b]) / 2;
            if (d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[b];
            }
          }
        };
        for (int b : active_) delta3(b);
        for (int b = n_; b < bhi_; ++b) delta3(b);
        for (int b = n_; b < bhi_; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 && dualvar_[b] < delta) {
            delta = dualvar_[b];
            deltatype = 4;
            deltablossom = b;
          }
        }

        for (int v : active_) {
          if (label_[inblossom_[v]] == 1)
            dualvar_[v] -= delta;
          else if (label_[inblossom_[v]] == 2)
            dualvar_[v] += delta;
        }
        for (int b = n_; b < bhi_; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
            if (label_[b] == 1)
              dualvar_[b] += delta;
            else if (label_[b] == 2)
              dualvar_[b] -= delta;
          }
        }

        if (deltatype == 1) {
          // an S-vertex reached zero: move the exposed end of its tree there
          augment_side(deltavertex, -1);
          augmented = true;
          break;
        } else if (deltatype == 2) {
          allowedge_[deltaedge] = 1;
          int i = edges_[deltaedge].i, j = edges_[deltaedge].j;
          if (label_[inblossom_[i]] == 0) std::swap(i, j);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[deltaedge] = 1;
          queue_.push_back(edges_[deltaedge].i);
        } else {
          expand_blossom(deltablossom, false);
        }
      }
      for (int b = n_; b < bhi_; ++b)
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 && dualvar_[b] == 0)
          expand_blossom(b, true);
    }
  }

  struct Span {
    const int* b;
    const int* e;
    const int* begin() const { return b; }
    const int* end() const { return e; }
  };
  Span neighbours(int v) const { return {nb_.data() + nb_off_[v], nb_.data() + nb_off_[v + 1]}; }

  static void clear_lists(std::vector<std::vector<int>>& lists, int size) {
    if (static_cast<int>(lists.size()) < size) lists.resize(static_cast<std::size_t>(size));
    for (int b = size / 2; b < size; ++b) lists[b].clear();
  }

  W slack(int k) const { return dualvar_[edges_[k].i] + dualvar_[edges_[k].j] - 2 * edges_[k].w; }

  void leaves(int b, std::vector<int>& out) const {
    out.clear();
    stack_.clear();
    stack_.push_back(b);
    while (!stack_.empty()) {
      int t = stack_.back();
      stack_.pop_back();
      if (t < n_) {
        out.push_back(t);
      } else {
        const auto& ch = blossomchilds_[t];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack_.push_back(*it);
      }
    }
  }

  int wrap(int b, int j) const {
    int len = static_cast<int>(blossomchilds_[b].size());
    return ((j % len) + len) % len;
  }

  void assign_label(int w, int t, int p) {
    int b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      leaves(b, lv_);
      queue_.insert(queue_.end(), lv_.begin(), lv_.end());
    } else if (t == 2) {
      int base = blossombase_[b];
      assert(mate_[base] >= 0);
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  int scan_blossom(int v, int w) {
    auto& path = scan_path_;
    path.clear();
    int base = -1;
    while (v != -1 || w != -1) {
      int b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      path.push_back(b);
      label_[b] = 5;
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edges_[k].i, w = edges_[k].j;
    int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    bhi_ = std::max(bhi_, b + 1);
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    auto& path = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0;

    leaves(b, lv_);
    for (int x : lv_) {
      if (label_[inblossom_[x]] == 2) queue_.push_back(x);
      inblossom_[x] = b;
    }

    auto& bestedgeto = bestedgeto_;
    bestedgeto.assign(2 * static_cast<std::size_t>(n_), -1);
    auto consider = [&](int kk) {
      int i = edges_[kk].i, j = edges_[kk].j;
      if (inblossom_[j] == b) std::swap(i, j);
      int bj = inblossom_[j];
      if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
        bestedgeto[bj] = kk;
    };
    auto& sub = lv_;
    for (int sb : path) {
      if (!has_bestedges_[sb]) {
        leaves(sb, sub);
        for (int x : sub)
          for (int p : neighbours(x))
            if (alive_[p >> 1]) consider(p >> 1);
      } else {
        for (int kk : blossombestedges_[sb]) consider(kk);
      }
      blossombestedges_[sb].clear();
      has_bestedges_[sb] = 0;
      bestedge_[sb] = -1;
    }
    auto& bl = blossombestedges_[b];
    bl.clear();
    for (int kk : bestedgeto)
      if (kk != -1) bl.push_back(kk);
    has_bestedges_[b] = 1;
    bestedge_[b] = -1;
    for (int kk : bl)
      if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }

  void expand_blossom(int b, bool endstage) {
    std::vector<int> lv;
    const std::vector<int> childs = blossomchilds_[b];
    for (int s : childs) {
      blossomparent_[s] = -1;
      if (s < n_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        leaves(s, lv);
        for (int x : lv) inblossom_[x] = s;
      }
    }
    if (!endstage && label_[b] == 2) {
      const auto& ch = blossomchilds_[b];
      const auto& ep = blossomendps_[b];
      int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      int j = static_cast<int>(std::find(ch.begin(), ch.end(), entrychild) - ch.begin());
      int jstep, endptrick;
      if (j & 1) {
        j -= static_cast<int>(ch.size());
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = labelend_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[ep[wrap(b, j - endptrick)] ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allowedge_[ep[wrap(b, j - endptrick)] / 2] = 1;
        j += jstep;
        p = ep[wrap(b, j - endptrick)] ^ endptrick;
        allowedge_[p / 2] = 1;
        j += jstep;
      }
      int bv = ch[wrap(b, j)];
      label_[endpoint_[p ^ 1]] = label_[bv] = 2;
      labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (ch[wrap(b, j)] != entrychild) {
        bv = ch[wrap(b, j)];
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        leaves(bv, lv);
        int v = -1;
        for (int x : lv) {
          v = x;
          if (label_[x] != 0) break;
        }
        if (v >= 0 && label_[v] != 0) {
          label_[v] = 0;
          label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
          assign_label(v, 2, labelend_[v]);
        }
        j += jstep;
      }
    }
    label_[b] = labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_bestedges_[b] = 0;
    bestedge_[b] = -1;
    unusedblossoms_.push_back(b);
  }

  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= n_) augment_blossom(t, v);
    auto& ch = blossomchilds_[b];
    auto& ep = blossomendps_[b];
    int i = static_cast<int>(std::find(ch.begin(), ch.end(), t) - ch.begin());
    int j = i;
    int jstep, endptrick;
    if (i & 1) {
      j -= static_cast<int>(ch.size());
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = ch[wrap(b, j)];
      int p = ep[wrap(b, j - endptrick)] ^ endptrick;
      if (t >= n_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = ch[wrap(b, j)];
      if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(ch.begin(), ch.begin() + i, ch.end());
    std::rotate(ep.begin(), ep.begin() + i, ep.end());
    blossombase_[b] = blossombase_[ch[0]];
    assert(blossombase_[b] == v);
  }

  // Flips the alternating path from s up to the root of its tree; s gets
  // mate endpoint p (-1 leaves it exposed).
  void augment_side(int s, int p) {
    while (true) {
      int bs = inblossom_[s];
      if (bs >= n_) augment_blossom(bs, s);
      mate_[s] = p;
      if (labelend_[bs] == -1) break;
      int t = endpoint_[labelend_[bs]];
      int bt = inblossom_[t];
      s = endpoint_[labelend_[bt]];
      int j = endpoint_[labelend_[bt] ^ 1];
      if (bt >= n_) augment_blossom(bt, j);
      mate_[j] = labelend_[bt];
      p = labelend_[bt] ^ 1;
    }
  }

  void augment_matching(int k) {
    augment_side(edges_[k].i, 2 * k + 1);
    augment_side(edges_[k].j, 2 * k);
  }

  int n_ = 0;
  std::vector<WeightedEdge<W>> edges_;
  std::vector<int> endpoint_;
  std::vector<int> nb_off_, nb_, fill_, bestedgeto_, lv_, scan_path_;
  std::vector<int> mate_, label_, labelend_, inblossom_, blossomparent_, blossombase_, bestedge_;
  std::vector<std::vector<int>> blossomchilds_, blossomendps_, blossombestedges_;
  std::vector<char> has_bestedges_, allowedge_, alive_;
  std::vector<int> deg_;
  std::vector<W> ybuf_;
  bool solved_ = false;
  std::vector<int> unusedblossoms_, queue_;
  // vertices that can take part in this solve; blossom ids in use are below bhi_
  std::vector<int> active_;
  int bhi_ = 0;
  std::vector<W> dualvar_;
  mutable std::vector<int> stack_;
};

}  // namespace qc::detail
