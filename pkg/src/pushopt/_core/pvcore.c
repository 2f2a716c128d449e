/* Push VM, vector instructions, landscapes and the population harness.
 *
 * All state lives in caller-owned arrays described by PVState; every array
 * has a leading member axis. Instructions check operands and output room
 * before touching anything, so an instruction either completes or leaves
 * the data stacks as they were.
 */

#define PY_SSIZE_T_CLEAN
#include <Python.h>

#include <float.h>
#include <math.h>
#include <stdint.h>
#include <stdlib.h>
#include <string.h>

/* size-table slots */
enum { NF, NI, NB, NV, NE, NFR, NIN, COUNT, LIMIT, NSLOTS };
/* frame slots */
enum { FR_BODY_NODE, FR_BODY_VAL, FR_INDEX, FR_MODE, FR_MARK, FR_SLOTS };

#define DYN_INT (-1)
#define DYN_OP (-2)
#define DYN_FRAME (-3)

#define IN_FLOAT 0
#define IN_INT 1
#define IN_BOOL 2

#define K_INSTR 0
#define K_FLOAT 1
#define K_INT 2
#define K_BOOL 3
#define K_BLOCK 4

#define INT_LIMIT ((int64_t)1 << 62)

#define T_BOOL 0
#define T_FLOAT 1
#define T_INT 2
#define T_VEC 3
#define T_EXEC 4
#define T_INPUT 5

#define G_DUP 0
#define G_FLUSH 1
#define G_POP 2
#define G_RAND 3
#define G_ROT 4
#define G_SHOVE 5
#define G_STACKDEPTH 6
#define G_SWAP 7
#define G_YANK 8
#define G_YANKDUP 9
#define GENERIC_LIMIT 64

#define EXEC_DUP (T_EXEC * 16 + G_DUP)
#define INPUT_STACKDEPTH (T_INPUT * 16 + G_STACKDEPTH)

#define B_EQ 100
#define B_AND 101
#define B_FROMFLOAT 102
#define B_FROMINTEGER 103
#define B_NOT 104
#define B_OR 105
#define B_XOR 106

#define X_EQ 110
#define X_DOCOUNT 111
#define X_DORANGE 112
#define X_DOTIMES 113
#define X_IF 114
#define X_IFLT 115
#define X_NOOP 116

#define F_MOD 120
#define F_MUL 121
#define F_ADD 122
#define F_SUB 123
#define F_DIV 124
#define F_LT 125
#define F_EQ 126
#define F_GT 127
#define F_ABS 128
#define F_COS 129
#define F_ERC 130
#define F_EXP 131
#define F_FROMBOOLEAN 132
#define F_FROMINTEGER 133
#define F_LN 134
#define F_LOG 135
#define F_MAX 136
#define F_MIN 137
#define F_NEG 138
#define F_POW 139
#define F_SIN 140
#define F_TAN 141

#define IN_INALL 150
#define IN_INALLREV 151
#define IN_INDEX 152

#define I_MOD 160
#define I_MUL 161
#define I_ADD 162
#define I_SUB 163
#define I_DIV 164
#define I_LT 165
#define I_EQ 166
#define I_GT 167
#define I_ABS 168
#define I_ERC 169
#define I_FROMBOOLEAN 170
#define I_FROMFLOAT 171
#define I_LN 172
#define I_LOG 173
#define I_MAX 174
#define I_MIN 175
#define I_NEG 176
#define I_POW 177

#define V_MUL 180
#define V_DIV 181
#define V_ADD 182
#define V_SUB 183
#define V_APPLY 184
#define V_BETWEEN 185
#define V_DIMADD 186
#define V_DIMMUL 187
#define V_DPROD 188
#define V_MAG 189
#define V_SCALE 190
#define V_URAND 191
#define V_WRAND 192
#define V_ZIP 193
#define V_CURRENT 194
#define V_BEST 195

#define X_DORANGE_NOINDEX 199

#define FLOAT_RAND_LO (-1.0)
#define FLOAT_RAND_HI 1.0
#define INT_RAND_LO (-10)
#define INT_RAND_HI 10

#define F1 1
#define F9 9
#define F12 12
#define F13 13
#define F14 14

#define PV_PI 3.14159265358979323846

/* checked against the Python constants at load time */
const int64_t pv_layout[] = {
    NF, NI, NB, NV, NE, NFR, NIN, COUNT, LIMIT, NSLOTS,
    FR_BODY_NODE, FR_BODY_VAL, FR_INDEX, FR_MODE, FR_MARK, FR_SLOTS,
    DYN_INT, DYN_OP, DYN_FRAME, IN_FLOAT, IN_INT, IN_BOOL,
    K_INSTR, K_FLOAT, K_INT, K_BOOL, K_BLOCK,
    EXEC_DUP, INPUT_STACKDEPTH, GENERIC_LIMIT,
    B_EQ, B_XOR, X_EQ, X_NOOP, F_MOD, F_TAN, IN_INALL, IN_INDEX,
    I_MOD, I_POW, V_MUL, V_BEST, X_DORANGE_NOINDEX,
    F1, F9, F12, F13, F14,
};
const int64_t pv_layout_size = sizeof(pv_layout) / sizeof(pv_layout[0]);

/* ------------------------------------------------------------------------ */
/* caller-visible structures */

typedef struct {
    int64_t members, dim;
    int64_t fcap, icap, bcap, vcap, ecap, frcap, incap;
    double *f;
    int64_t *i;
    int8_t *b;
    double *v;
    int64_t *exn, *exv;
    double *frv, *frw;
    int64_t *frm;
    int8_t *inkind;
    double *inf;
    int64_t *ini;
    int64_t *n;
    uint64_t *rng;
} PVState;

typedef struct {
    int64_t nodes;
    int8_t *kind;
    int64_t *op;
    double *fval;
    int64_t *ival, *cstart, *ccount, *children, *canon;
} PVCode;

typedef struct {
    int64_t popsize;
    const double *cur, *best;
    int64_t self_index;
} PVView;

typedef struct {
    int64_t fid, dim;
    const double *a, *b, *alpha;
    const double *shift, *scale, *flip;
    const double *lower, *upper;
    double *buf;
} PVLand;

typedef struct {
    int64_t popsize, dim;
    double *cur, *best, *value, *bestval;
    double *pstate; /* pbest, pbestindex */
    double *point;
    int64_t steps;
} PVSwarm;

typedef struct {
    int64_t *rows;  /* row x (repeat, move, member, improved, in_bounds) */
    double *values;
    double *points;
    int64_t row;
} PVTrace;

/* one member's slice of the state */
typedef struct {
    double *f;
    int64_t *i;
    int8_t *b;
    double *v;
    int64_t *exn, *exv;
    double *frv, *frw;
    int64_t *frm;
    const int8_t *inkind;
    const double *inf;
    const int64_t *ini;
    int64_t *n;
    int64_t fcap, icap, bcap, vcap, ecap, frcap, D, p;
    uint64_t *rng;
} Mem;

static inline Mem member(const PVState *s, int64_t p) {
    Mem m;
    int64_t D = s->dim;
    m.f = s->f + p * s->fcap;
    m.i = s->i + p * s->icap;
    m.b = s->b + p * s->bcap;
    m.v = s->v + p * s->vcap * D;
    m.exn = s->exn + p * s->ecap;
    m.exv = s->exv + p * s->ecap;
    m.frv = s->frv + p * s->frcap * D;
    m.frw = s->frw + p * s->frcap * D;
    m.frm = s->frm + p * s->frcap * FR_SLOTS;
    m.inkind = s->inkind + p * s->incap;
    m.inf = s->inf + p * s->incap;
    m.ini = s->ini + p * s->incap;
    m.n = s->n + p * NSLOTS;
    m.fcap = s->fcap;
    m.icap = s->icap;
    m.bcap = s->bcap;
    m.vcap = s->vcap;
    m.ecap = s->ecap;
    m.frcap = s->frcap;
    m.D = D;
    m.p = p;
    m.rng = s->rng;
    return m;
}

/* ------------------------------------------------------------------------ */
/* random numbers: xoshiro256** seeded through splitmix64 */

static inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

static inline uint64_t rng_next(uint64_t *s) {
    uint64_t r = rotl(s[1] * 5, 7) * 9;
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return r;
}

void pv_seed(uint64_t *s, uint64_t seed) {
    uint64_t x = seed;
    for (int k = 0; k < 4; k++) {
        uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        s[k] = z ^ (z >> 31);
    }
}

static inline double rng_uniform(uint64_t *s) { return (double)(rng_next(s) >> 11) * 0x1.0p-53; }

static inline int64_t rng_int(uint64_t *s, int64_t lo, int64_t hi) {
    uint64_t span = (uint64_t)(hi - lo) + 1;
    return lo + (int64_t)(rng_next(s) % span);
}

static double rng_normal(uint64_t *s) {
    double u, v, q;
    do {
        u = 2.0 * rng_uniform(s) - 1.0;
        v = 2.0 * rng_uniform(s) - 1.0;
        q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    return u * sqrt(-2.0 * log(q) / q);
}

/* exported for tests of the stream itself */
double pv_uniform(uint64_t *s) { return rng_uniform(s); }
int64_t pv_randint(uint64_t *s, int64_t lo, int64_t hi) { return rng_int(s, lo, hi); }
double pv_normal(uint64_t *s) { return rng_normal(s); }

/* ------------------------------------------------------------------------ */
/* stack primitives; pushes onto a full stack are dropped */

static inline void fpush(Mem *m, double x) {
    int64_t k = m->n[NF];
    if (k < m->fcap) { m->f[k] = x; m->n[NF] = k + 1; }
}
static inline void ipush(Mem *m, int64_t x) {
    int64_t k = m->n[NI];
    if (k < m->icap) { m->i[k] = x; m->n[NI] = k + 1; }
}
static inline void bpush(Mem *m, int x) {
    int64_t k = m->n[NB];
    if (k < m->bcap) { m->b[k] = x ? 1 : 0; m->n[NB] = k + 1; }
}
static inline void vpush(Mem *m, const double *x) {
    int64_t k = m->n[NV];
    if (k < m->vcap) { memcpy(m->v + k * m->D, x, m->D * sizeof(double)); m->n[NV] = k + 1; }
}
static inline void expush(Mem *m, int64_t node, int64_t val) {
    int64_t k = m->n[NE];
    if (k < m->ecap) { m->exn[k] = node; m->exv[k] = val; m->n[NE] = k + 1; }
}
static inline double fpop(Mem *m) { return m->f[--m->n[NF]]; }
static inline int64_t ipop(Mem *m) { return m->i[--m->n[NI]]; }
static inline int bpop(Mem *m) { return m->b[--m->n[NB]] != 0; }
static inline double *vtop(Mem *m, int64_t k) { return m->v + k * m->D; }

static inline int64_t min64(int64_t a, int64_t b) { return a < b ? a : b; }
static inline int64_t abs64(int64_t a) { return a < 0 ? -a : a; }

/* ------------------------------------------------------------------------ */
/* generic stack instructions */

#define GENERIC_SCALAR(NAME, T, ARR, SLOT, CAP, IS_INT)                         \
    static void NAME(Mem *m, int g) {                                          \
        T *a = m->ARR;                                                         \
        int64_t n = m->n[SLOT];                                                \
        int64_t cap = m->CAP;                                                  \
        switch (g) {                                                           \
        case G_DUP:                                                            \
            if (n < 1 || n >= cap) return;                                     \
            a[n] = a[n - 1];                                                   \
            m->n[SLOT] = n + 1;                                                \
            return;                                                            \
        case G_FLUSH: m->n[SLOT] = 0; return;                                  \
        case G_POP: if (n >= 1) m->n[SLOT] = n - 1; return;                    \
        case G_ROT: {                                                          \
            if (n < 3) return;                                                 \
            T x = a[n - 3];                                                    \
            a[n - 3] = a[n - 2];                                               \
            a[n - 2] = a[n - 1];                                               \
            a[n - 1] = x;                                                      \
            return;                                                            \
        }                                                                      \
        case G_SWAP: {                                                         \
            if (n < 2) return;                                                 \
            T x = a[n - 1];                                                    \
            a[n - 1] = a[n - 2];                                               \
            a[n - 2] = x;                                                      \
            return;                                                            \
        }                                                                      \
        case G_STACKDEPTH: ipush(m, n); return;                                \
        default: break;                                                        \
        }                                                                      \
        /* shove / yank / yankdup take a depth from the integer stack */       \
        if (IS_INT) {                                                          \
            if (n < 2) return;                                                 \
        } else if (m->n[NI] < 1 || n < 1) {                                    \
            return;                                                            \
        }                                                                      \
        if (g == G_YANKDUP && !(IS_INT) && n >= cap) return;                   \
        int64_t depth = abs64(ipop(m));                                        \
        n = m->n[SLOT];                                                        \
        if (g == G_SHOVE) {                                                    \
            T x = a[n - 1];                                                    \
            int64_t rest = n - 1;                                              \
            int64_t pos = rest - min64(depth, rest);                           \
            for (int64_t k = rest; k > pos; k--) a[k] = a[k - 1];              \
            a[pos] = x;                                                        \
        } else {                                                               \
            int64_t pos = n - 1 - min64(depth, n - 1);                         \
            T x = a[pos];                                                      \
            if (g == G_YANK) {                                                 \
                for (int64_t k = pos; k < n - 1; k++) a[k] = a[k + 1];         \
                a[n - 1] = x;                                                  \
            } else {                                                           \
                a[n] = x;                                                      \
                m->n[SLOT] = n + 1;                                            \
            }                                                                  \
        }                                                                      \
    }

GENERIC_SCALAR(generic_float, double, f, NF, fcap, 0)
GENERIC_SCALAR(generic_int, int64_t, i, NI, icap, 1)
GENERIC_SCALAR(generic_bool, int8_t, b, NB, bcap, 0)

static void vcopy(Mem *m, int64_t dst, int64_t src) {
    memcpy(m->v + dst * m->D, m->v + src * m->D, m->D * sizeof(double));
}

static void generic_vector(Mem *m, int g) {
    int64_t n = m->n[NV];
    int64_t D = m->D;
    double *v = m->v;
    switch (g) {
    case G_DUP:
        if (n < 1 || n >= m->vcap) return;
        vcopy(m, n, n - 1);
        m->n[NV] = n + 1;
        return;
    case G_FLUSH: m->n[NV] = 0; return;
    case G_POP: if (n >= 1) m->n[NV] = n - 1; return;
    case G_ROT:
        if (n < 3) return;
        for (int64_t d = 0; d < D; d++) {
            double x = v[(n - 3) * D + d];
            v[(n - 3) * D + d] = v[(n - 2) * D + d];
            v[(n - 2) * D + d] = v[(n - 1) * D + d];
            v[(n - 1) * D + d] = x;
        }
        return;
    case G_SWAP:
        if (n < 2) return;
        for (int64_t d = 0; d < D; d++) {
            double x = v[(n - 1) * D + d];
            v[(n - 1) * D + d] = v[(n - 2) * D + d];
            v[(n - 2) * D + d] = x;
        }
        return;
    case G_STACKDEPTH: ipush(m, n); return;
    default: break;
    }
    if (m->n[NI] < 1 || n < 1) return;
    if (g == G_YANKDUP && n >= m->vcap) return;
    int64_t depth = abs64(ipop(m));
    if (g == G_SHOVE) {
        int64_t rest = n - 1;
        int64_t pos = rest - min64(depth, rest);
        for (int64_t d = 0; d < D; d++) {
            double x = v[(n - 1) * D + d];
            for (int64_t k = rest; k > pos; k--) v[k * D + d] = v[(k - 1) * D + d];
            v[pos * D + d] = x;
        }
    } else {
        int64_t pos = n - 1 - min64(depth, n - 1);
        if (g == G_YANK) {
            for (int64_t d = 0; d < D; d++) {
                double x = v[pos * D + d];
                for (int64_t k = pos; k < n - 1; k++) v[k * D + d] = v[(k + 1) * D + d];
                v[(n - 1) * D + d] = x;
            }
        } else {
            vcopy(m, n, pos);
            m->n[NV] = n + 1;
        }
    }
}

/* (lower, upper) from the first two float inputs, else (-1, 1) */
static void input_bounds(Mem *m, double *lo, double *hi) {
    double a = -1.0, b = 1.0;
    int found = 0;
    for (int64_t k = 0; k < m->n[NIN] && found < 2; k++) {
        if (m->inkind[k] == IN_FLOAT) {
            if (found == 0) a = m->inf[k]; else b = m->inf[k];
            found++;
        }
    }
    if (found < 2 || !(b > a)) { a = -1.0; b = 1.0; }
    *lo = a;
    *hi = b;
}

static void vector_rand(Mem *m) {
    int64_t nv = m->n[NV];
    if (nv >= m->vcap) return;
    double lo, hi;
    input_bounds(m, &lo, &hi);
    double *out = vtop(m, nv);
    for (int64_t d = 0; d < m->D; d++) out[d] = lo + (hi - lo) * rng_uniform(m->rng);
    m->n[NV] = nv + 1;
}

static void generic(Mem *m, int op) {
    int t = op >> 4, g = op & 15;
    if (g == G_RAND) {
        if (t == T_BOOL) {
            if (m->n[NB] < m->bcap) bpush(m, rng_uniform(m->rng) < 0.5);
        } else if (t == T_FLOAT) {
            if (m->n[NF] < m->fcap)
                fpush(m, FLOAT_RAND_LO + (FLOAT_RAND_HI - FLOAT_RAND_LO) * rng_uniform(m->rng));
        } else if (t == T_INT) {
            if (m->n[NI] < m->icap) ipush(m, rng_int(m->rng, INT_RAND_LO, INT_RAND_HI));
        } else {
            vector_rand(m);
        }
        return;
    }
    switch (t) {
    case T_VEC: generic_vector(m, g); break;
    case T_FLOAT: generic_float(m, g); break;
    case T_INT: generic_int(m, g); break;
    default: generic_bool(m, g); break;
    }
}

/* ------------------------------------------------------------------------ */
/* boolean */

static void boolean_op(Mem *m, int op) {
    int64_t nb = m->n[NB];
    if (op == B_NOT) {
        if (nb >= 1) m->b[nb - 1] = 1 - m->b[nb - 1];
    } else if (op == B_FROMFLOAT) {
        if (m->n[NF] >= 1 && nb < m->bcap) bpush(m, fpop(m) != 0.0);
    } else if (op == B_FROMINTEGER) {
        if (m->n[NI] >= 1 && nb < m->bcap) bpush(m, ipop(m) != 0);
    } else {
        if (nb < 2) return;
        int y = bpop(m), x = bpop(m), r;
        if (op == B_EQ) r = x == y;
        else if (op == B_AND) r = x && y;
        else if (op == B_OR) r = x || y;
        else r = x != y;
        bpush(m, r);
    }
}

/* ------------------------------------------------------------------------ */
/* exec */

enum { C_INT, C_OP, C_STATIC, C_FRAME };

static void entry_class(const PVCode *c, int64_t node, int64_t val, int64_t *cls, int64_t *key) {
    if (node >= 0) {
        int k = c->kind[node];
        if (k == K_INT) { *cls = C_INT; *key = c->ival[node]; }
        else if (k == K_INSTR) { *cls = C_OP; *key = c->op[node]; }
        else { *cls = C_STATIC; *key = c->canon[node]; }
    } else if (node == DYN_INT) {
        *cls = C_INT; *key = val;
    } else if (node == DYN_OP) {
        *cls = C_OP; *key = val;
    } else {
        *cls = C_FRAME; *key = val;
    }
}

static void do_range(Mem *m, int op) {
    if (m->n[NI] < 2 || m->n[NE] < 1) return;
    if (m->n[NE] + 4 > m->ecap) return;
    int64_t dest = ipop(m);
    int64_t cur = ipop(m);
    if (op == X_DORANGE) ipush(m, cur);
    if (cur == dest) return;
    int64_t stp = dest > cur ? 1 : -1;
    int64_t e = m->n[NE] - 1;
    int64_t body_node = m->exn[e], body_val = m->exv[e];
    /* body runs now; the continuation (next dest do*range body) sits below
     * it and re-reads its body from the entry left in place at e */
    expush(m, DYN_OP, op);
    expush(m, DYN_INT, dest);
    expush(m, DYN_INT, cur + stp);
    expush(m, body_node, body_val);
}

static void do_count(Mem *m, int op) {
    if (m->n[NI] < 1 || m->n[NE] < 1) return;
    if (m->n[NE] + 3 > m->ecap) return;
    int64_t n = ipop(m);
    if (n <= 0) { m->n[NE] -= 1; return; }
    expush(m, DYN_OP, op == X_DOCOUNT ? X_DORANGE : X_DORANGE_NOINDEX);
    expush(m, DYN_INT, n - 1);
    expush(m, DYN_INT, 0);
}

static void exec_op(Mem *m, int op, const PVCode *c) {
    int64_t ne = m->n[NE];
    switch (op) {
    case X_NOOP: return;
    case X_DORANGE:
    case X_DORANGE_NOINDEX: do_range(m, op); return;
    case X_DOCOUNT:
    case X_DOTIMES: do_count(m, op); return;
    case X_EQ: {
        if (ne < 2 || m->n[NB] >= m->bcap) return;
        int64_t c1, k1, c2, k2;
        entry_class(c, m->exn[ne - 1], m->exv[ne - 1], &c1, &k1);
        entry_class(c, m->exn[ne - 2], m->exv[ne - 2], &c2, &k2);
        m->n[NE] = ne - 2;
        bpush(m, c1 == c2 && k1 == k2);
        return;
    }
    case X_IF:
    case X_IFLT: {
        if (ne < 2) return;
        int keep_first;
        if (op == X_IF) {
            if (m->n[NB] < 1) return;
            keep_first = bpop(m);
        } else {
            if (m->n[NF] < 2) return;
            double b = fpop(m), a = fpop(m);
            keep_first = a < b;
        }
        if (keep_first) {
            m->exn[ne - 2] = m->exn[ne - 1];
            m->exv[ne - 2] = m->exv[ne - 1];
        }
        m->n[NE] = ne - 1;
        return;
    }
    case EXEC_DUP:
        if (ne < 1 || ne >= m->ecap) return;
        expush(m, m->exn[ne - 1], m->exv[ne - 1]);
        return;
    default: return;
    }
}

/* ------------------------------------------------------------------------ */
/* float */

static void float_op(Mem *m, int op) {
    int64_t nf = m->n[NF];
    double r;
    switch (op) {
    case F_ERC:
        if (nf < m->fcap) fpush(m, FLOAT_RAND_LO + (FLOAT_RAND_HI - FLOAT_RAND_LO) * rng_uniform(m->rng));
        return;
    case F_FROMBOOLEAN:
        if (m->n[NB] >= 1 && nf < m->fcap) fpush(m, bpop(m) ? 1.0 : 0.0);
        return;
    case F_FROMINTEGER:
        if (m->n[NI] >= 1 && nf < m->fcap) fpush(m, (double)ipop(m));
        return;
    case F_ABS: case F_COS: case F_EXP: case F_LN: case F_LOG:
    case F_NEG: case F_SIN: case F_TAN: {
        if (nf < 1) return;
        double x = m->f[nf - 1];
        switch (op) {
        case F_ABS: r = fabs(x); break;
        case F_COS: r = cos(x); break;
        case F_EXP: r = exp(x); break;
        case F_LN: if (x <= 0.0) return; r = log(x); break;
        case F_LOG: if (x <= 0.0) return; r = log10(x); break;
        case F_NEG: r = -x; break;
        case F_SIN: r = sin(x); break;
        default: r = tan(x); break;
        }
        if (isfinite(r)) m->f[nf - 1] = r;
        return;
    }
    default: break;
    }
    if (nf < 2) return;
    double a = m->f[nf - 2], b = m->f[nf - 1];
    switch (op) {
    case F_LT: case F_EQ: case F_GT:
        if (m->n[NB] >= m->bcap) return;
        m->n[NF] = nf - 2;
        bpush(m, op == F_LT ? a < b : op == F_EQ ? a == b : a > b);
        return;
    case F_MOD: if (b == 0.0) return; r = fmod(a, b); break;
    case F_MUL: r = a * b; break;
    case F_ADD: r = a + b; break;
    case F_SUB: r = a - b; break;
    case F_DIV: if (b == 0.0) return; r = a / b; break;
    case F_MAX: r = a > b ? a : b; break;
    case F_MIN: r = a < b ? a : b; break;
    default: /* pow */
        if (a == 0.0 && b < 0.0) return;
        if (a < 0.0 && b != floor(b)) return;
        r = pow(a, b);
        break;
    }
    if (!isfinite(r)) return;
    m->f[nf - 2] = r;
    m->n[NF] = nf - 1;
}

/* ------------------------------------------------------------------------ */
/* integer; division truncates toward zero and % takes the dividend's sign */

static inline int64_t trunc_div(int64_t a, int64_t b) {
    int64_t q = abs64(a) / abs64(b);
    return ((a >= 0) == (b >= 0)) ? q : -q;
}

static void integer_op(Mem *m, int op) {
    int64_t ni = m->n[NI], r;
    switch (op) {
    case I_ERC:
        if (ni < m->icap) ipush(m, rng_int(m->rng, INT_RAND_LO, INT_RAND_HI));
        return;
    case I_FROMBOOLEAN:
        if (m->n[NB] >= 1 && ni < m->icap) ipush(m, bpop(m) ? 1 : 0);
        return;
    case I_FROMFLOAT:
        if (m->n[NF] >= 1 && ni < m->icap) {
            double x = m->f[m->n[NF] - 1];
            if (!(fabs(x) < (double)INT_LIMIT)) return;
            m->n[NF] -= 1;
            ipush(m, (int64_t)x);
        }
        return;
    case I_ABS: case I_NEG: case I_LN: case I_LOG: {
        if (ni < 1) return;
        int64_t x = m->i[ni - 1];
        if (op == I_ABS) r = abs64(x);
        else if (op == I_NEG) r = -x;
        else {
            if (x <= 0) return;
            r = (int64_t)(op == I_LN ? log((double)x) : log10((double)x));
        }
        m->i[ni - 1] = r;
        return;
    }
    default: break;
    }
    if (ni < 2) return;
    int64_t a = m->i[ni - 2], b = m->i[ni - 1];
    switch (op) {
    case I_LT: case I_EQ: case I_GT:
        if (m->n[NB] >= m->bcap) return;
        m->n[NI] = ni - 2;
        bpush(m, op == I_LT ? a < b : op == I_EQ ? a == b : a > b);
        return;
    case I_MOD: if (b == 0) return; r = a - b * trunc_div(a, b); break;
    case I_MUL:
        if (fabs((double)a * (double)b) >= (double)INT_LIMIT) return;
        r = a * b;
        break;
    case I_ADD: r = a + b; break;
    case I_SUB: r = a - b; break;
    case I_DIV: if (b == 0) return; r = trunc_div(a, b); break;
    case I_MAX: r = a > b ? a : b; break;
    case I_MIN: r = a < b ? a : b; break;
    default: { /* pow */
        if (a == 0 && b < 0) return;
        double fr = pow((double)a, (double)b);
        if (!isfinite(fr) || fabs(fr) >= (double)INT_LIMIT) return;
        r = (int64_t)fr;
        break;
    }
    }
    if (abs64(r) >= INT_LIMIT) return;
    m->i[ni - 2] = r;
    m->n[NI] = ni - 1;
}

/* ------------------------------------------------------------------------ */
/* input */

static void push_input(Mem *m, int64_t k) {
    int kind = m->inkind[k];
    if (kind == IN_FLOAT) fpush(m, m->inf[k]);
    else if (kind == IN_BOOL) bpush(m, m->ini[k] != 0);
    else ipush(m, m->ini[k]);
}

static int64_t input_room(Mem *m, int64_t k) {
    int kind = m->inkind[k];
    if (kind == IN_FLOAT) return m->fcap - m->n[NF];
    if (kind == IN_BOOL) return m->bcap - m->n[NB];
    return m->icap - m->n[NI];
}

static void input_op(Mem *m, int op) {
    int64_t nin = m->n[NIN];
    if (nin == 0) return;
    if (op == IN_INDEX) {
        if (m->n[NI] < 1) return;
        int64_t k = abs64(m->i[m->n[NI] - 1]) % nin;
        /* the index itself frees a slot when the target is the integer stack */
        m->n[NI] -= 1;
        if (input_room(m, k) < 1) { m->n[NI] += 1; return; }
        push_input(m, k);
        return;
    }
    int64_t nfl = 0, nbo = 0, nint = 0;
    for (int64_t k = 0; k < nin; k++) {
        int kind = m->inkind[k];
        if (kind == IN_FLOAT) nfl++;
        else if (kind == IN_BOOL) nbo++;
        else nint++;
    }
    if (m->n[NF] + nfl > m->fcap || m->n[NB] + nbo > m->bcap || m->n[NI] + nint > m->icap) return;
    if (op == IN_INALL) {
        for (int64_t k = 0; k < nin; k++) push_input(m, k);
    } else {
        for (int64_t k = nin - 1; k >= 0; k--) push_input(m, k);
    }
}

/* ------------------------------------------------------------------------ */
/* vector */

static void vector_binary(Mem *m, int op) {
    int64_t nv = m->n[NV], D = m->D;
    if (nv < 2) return;
    double *x = vtop(m, nv - 2), *y = vtop(m, nv - 1);
    /* check first so a failed op leaves both operands in place */
    for (int64_t d = 0; d < D; d++) {
        double r;
        if (op == V_ADD) r = x[d] + y[d];
        else if (op == V_SUB) r = x[d] - y[d];
        else if (op == V_MUL) r = x[d] * y[d];
        else {
            if (y[d] == 0.0) return;
            r = x[d] / y[d];
        }
        if (!isfinite(r)) return;
    }
    for (int64_t d = 0; d < D; d++) {
        if (op == V_ADD) x[d] = x[d] + y[d];
        else if (op == V_SUB) x[d] = x[d] - y[d];
        else if (op == V_MUL) x[d] = x[d] * y[d];
        else x[d] = x[d] / y[d];
    }
    m->n[NV] = nv - 1;
}

static void start_frame(Mem *m, int mode) {
    int64_t nv = m->n[NV], D = m->D;
    int64_t need = mode == 1 ? 2 : 1;
    if (nv < need || m->n[NE] < 1 || m->n[NFR] >= m->frcap) return;
    int64_t level = m->n[NFR];
    if (mode == 1) {
        memcpy(m->frv + level * D, vtop(m, nv - 2), D * sizeof(double));
        memcpy(m->frw + level * D, vtop(m, nv - 1), D * sizeof(double));
    } else {
        memcpy(m->frv + level * D, vtop(m, nv - 1), D * sizeof(double));
    }
    m->n[NV] = nv - need;
    int64_t e = m->n[NE] - 1;
    int64_t *fm = m->frm + level * FR_SLOTS;
    fm[FR_BODY_NODE] = m->exn[e];
    fm[FR_BODY_VAL] = m->exv[e];
    fm[FR_INDEX] = 0;
    fm[FR_MODE] = mode;
    fm[FR_MARK] = -1;
    m->n[NFR] = level + 1;
    /* the body's exec slot now holds the frame continuation */
    m->exn[e] = DYN_FRAME;
    m->exv[e] = level;
}

/* advance an apply/zip loop by one component */
static void frame_step(Mem *m, int64_t level) {
    if (level != m->n[NFR] - 1) return;
    int64_t D = m->D;
    int64_t *fm = m->frm + level * FR_SLOTS;
    double *fv = m->frv + level * D;
    int64_t k = fm[FR_INDEX];
    int64_t mark = fm[FR_MARK];
    if (mark >= 0) {
        if (m->n[NF] > mark) fv[k - 1] = fpop(m);
        fm[FR_MARK] = -1;
    }
    if (k >= D) {
        m->n[NFR] = level;
        vpush(m, fv);
        return;
    }
    int zipping = fm[FR_MODE] == 1;
    int64_t pushes = zipping ? 2 : 1;
    if (m->n[NE] + 2 > m->ecap || m->n[NF] + pushes > m->fcap) {
        m->n[NFR] = level;
        return;
    }
    fm[FR_MARK] = m->n[NF];
    if (zipping) fpush(m, m->frw[level * D + k]);
    fpush(m, fv[k]);
    fm[FR_INDEX] = k + 1;
    expush(m, DYN_FRAME, level);
    expush(m, fm[FR_BODY_NODE], fm[FR_BODY_VAL]);
}

/* exact at t = 0, t = 1 and a == b; the convex form covers y - x overflowing */
static inline double lerp(double a, double b, double t) {
    if (t >= 1.0) return b;
    double diff = b - a;
    if (isfinite(diff)) return a + t * diff;
    return (1.0 - t) * a + t * b;
}

static inline int64_t member_index(int64_t index, int64_t popsize, int64_t self_index) {
    if (index < 0) return self_index;
    return index % popsize;
}

static void vector_op(Mem *m, int op, const PVView *view) {
    int64_t D = m->D, nv = m->n[NV];
    switch (op) {
    case V_ADD: case V_SUB: case V_MUL: case V_DIV:
        vector_binary(m, op);
        return;
    case V_SCALE: {
        if (nv < 1 || m->n[NF] < 1) return;
        double s = m->f[m->n[NF] - 1];
        double *x = vtop(m, nv - 1);
        for (int64_t d = 0; d < D; d++)
            if (!isfinite(x[d] * s)) return;
        for (int64_t d = 0; d < D; d++) x[d] *= s;
        m->n[NF] -= 1;
        return;
    }
    case V_DPROD: case V_MAG: {
        int64_t need = op == V_DPROD ? 2 : 1;
        if (nv < need || m->n[NF] >= m->fcap) return;
        double acc = 0.0;
        if (op == V_DPROD) {
            double *x = vtop(m, nv - 2), *y = vtop(m, nv - 1);
            for (int64_t d = 0; d < D; d++) acc += x[d] * y[d];
        } else {
            /* scaled by the largest component so tiny or huge vectors neither
             * underflow to 0 nor overflow to inf */
            double *x = vtop(m, nv - 1), big = 0.0;
            for (int64_t d = 0; d < D; d++) big = fmax(big, fabs(x[d]));
            if (big > 0.0) {
                for (int64_t d = 0; d < D; d++) acc += (x[d] / big) * (x[d] / big);
                acc = big * sqrt(acc);
            }
        }
        if (!isfinite(acc)) return;
        m->n[NV] = nv - need;
        fpush(m, acc);
        return;
    }
    case V_DIMADD: case V_DIMMUL: {
        /* pushes a copy of the top vector with one component changed */
        if (nv < 1 || m->n[NF] < 1 || m->n[NI] < 1) return;
        double f = m->f[m->n[NF] - 1];
        int64_t d = abs64(m->i[m->n[NI] - 1]) % D;
        double *x = vtop(m, nv - 1);
        double r = op == V_DIMADD ? x[d] + f : x[d] * f;
        if (!isfinite(r) || nv >= m->vcap) return;
        vcopy(m, nv, nv - 1);
        vtop(m, nv)[d] = r;
        m->n[NV] = nv + 1;
        m->n[NF] -= 1;
        m->n[NI] -= 1;
        return;
    }
    case V_APPLY: start_frame(m, 0); return;
    case V_ZIP: start_frame(m, 1); return;
    case V_BETWEEN: {
        if (nv < 2 || m->n[NF] < 1) return;
        double t = m->f[m->n[NF] - 1];
        t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
        double *x = vtop(m, nv - 2), *y = vtop(m, nv - 1);
        for (int64_t d = 0; d < D; d++)
            if (!isfinite(lerp(x[d], y[d], t))) return;
        for (int64_t d = 0; d < D; d++) x[d] = lerp(x[d], y[d], t);
        m->n[NF] -= 1;
        m->n[NV] = nv - 1;
        return;
    }
    case V_URAND: {
        if (nv >= m->vcap) return;
        double *x = vtop(m, nv);
        double norm = 0.0;
        while (norm == 0.0) {
            for (int64_t d = 0; d < D; d++) {
                double g = rng_normal(m->rng);
                x[d] = g;
                norm += g * g;
            }
            norm = sqrt(norm);
        }
        for (int64_t d = 0; d < D; d++) x[d] /= norm;
        m->n[NV] = nv + 1;
        return;
    }
    case V_WRAND: {
        if (nv >= m->vcap || m->n[NF] < 1) return;
        double w = fabs(fpop(m));
        double *x = vtop(m, nv);
        for (int64_t d = 0; d < D; d++) x[d] = w * (2.0 * rng_uniform(m->rng) - 1.0);
        m->n[NV] = nv + 1;
        return;
    }
    case V_CURRENT: case V_BEST: {
        if (nv >= m->vcap) return;
        int64_t idx = view->self_index;
        if (m->n[NI] > 0) idx = member_index(ipop(m), view->popsize, view->self_index);
        const double *src = (op == V_CURRENT ? view->cur : view->best) + idx * D;
        memcpy(vtop(m, nv), src, D * sizeof(double));
        m->n[NV] = nv + 1;
        return;
    }
    default: return;
    }
}

/* ------------------------------------------------------------------------ */
/* dispatch and execution */

static void dispatch(Mem *m, int op, const PVCode *c, const PVView *view) {
    if (op < GENERIC_LIMIT) generic(m, op);
    else if (op < 100) {
        if (op == EXEC_DUP) exec_op(m, op, c);
        else if (op == INPUT_STACKDEPTH) ipush(m, m->n[NIN]);
    }
    else if (op < 110) boolean_op(m, op);
    else if (op < 120) exec_op(m, op, c);
    else if (op < 150) float_op(m, op);
    else if (op < 160) input_op(m, op);
    else if (op < 180) integer_op(m, op);
    else if (op < 199) vector_op(m, op, view);
    else exec_op(m, op, c);
}

static void push_block(Mem *m, const PVCode *c, int64_t node) {
    int64_t start = c->cstart[node], count = c->ccount[node];
    if (m->n[NE] + count > m->ecap) return;
    for (int64_t k = start + count - 1; k >= start; k--) expush(m, c->children[k], 0);
}

/* pop and execute one exec entry, charging one execution */
static inline void step(Mem *m, const PVCode *c, const PVView *view) {
    int64_t e = m->n[NE] - 1;
    int64_t node = m->exn[e], val = m->exv[e];
    m->n[NE] = e;
    m->n[COUNT] += 1;
    if (node >= 0) {
        switch (c->kind[node]) {
        case K_INSTR: dispatch(m, (int)c->op[node], c, view); break;
        case K_FLOAT: fpush(m, c->fval[node]); break;
        case K_INT: ipush(m, c->ival[node]); break;
        case K_BOOL: bpush(m, c->ival[node] != 0); break;
        default: push_block(m, c, node); break;
        }
    } else if (node == DYN_INT) {
        ipush(m, val);
    } else if (node == DYN_OP) {
        dispatch(m, (int)val, c, view);
    } else {
        frame_step(m, val);
    }
}

static int64_t run_exec(Mem *m, const PVCode *c, const PVView *view) {
    int64_t limit = m->n[LIMIT];
    while (m->n[NE] > 0 && m->n[COUNT] < limit) step(m, c, view);
    return m->n[COUNT];
}

/* re-seed exec with the program's atoms; data stacks carry over */
static int64_t run_move(Mem *m, const PVCode *c, const PVView *view) {
    m->n[NE] = 0;
    m->n[NFR] = 0;
    m->n[COUNT] = 0;
    push_block(m, c, 0);
    return run_exec(m, c, view);
}

void pv_push_block(const PVState *s, int64_t p, const PVCode *c) {
    Mem m = member(s, p);
    push_block(&m, c, 0);
}

void pv_step(const PVState *s, int64_t p, const PVCode *c, const PVView *view) {
    Mem m = member(s, p);
    step(&m, c, view);
}

int64_t pv_run_exec(const PVState *s, int64_t p, const PVCode *c, const PVView *view) {
    Mem m = member(s, p);
    return run_exec(&m, c, view);
}

int64_t pv_run_move(const PVState *s, int64_t p, const PVCode *c, const PVView *view) {
    Mem m = member(s, p);
    return run_move(&m, c, view);
}

/* execute one instruction directly, outside any program */
void pv_apply(const PVState *s, int64_t p, int64_t op, const PVCode *c, const PVView *view) {
    Mem m = member(s, p);
    dispatch(&m, (int)op, c, view);
}

/* apply instruction ops[p] to member p, for every member */
void pv_apply_each(const PVState *s, const int64_t *ops, const PVCode *c, const PVView *view) {
    for (int64_t p = 0; p < s->members; p++) {
        Mem m = member(s, p);
        dispatch(&m, (int)ops[p], c, view);
    }
}

/* ------------------------------------------------------------------------ */
/* landscapes */

static double sphere(const double *x, int64_t D) {
    double s = 0.0;
    for (int64_t i = 0; i < D; i++) s += x[i] * x[i];
    return s;
}

static double rastrigin(const double *x, int64_t D) {
    double s = 0.0;
    for (int64_t i = 0; i < D; i++) s += x[i] * x[i] - 10.0 * cos(2.0 * PV_PI * x[i]) + 10.0;
    return s;
}

static double schwefel_213(const double *x, int64_t D, const double *a, const double *b,
                           const double *alpha) {
    double s = 0.0;
    for (int64_t i = 0; i < D; i++) {
        double ai = 0.0, bi = 0.0;
        for (int64_t j = 0; j < D; j++) {
            ai += a[i * D + j] * sin(alpha[j]) + b[i * D + j] * cos(alpha[j]);
            bi += a[i * D + j] * sin(x[j]) + b[i * D + j] * cos(x[j]);
        }
        s += (ai - bi) * (ai - bi);
    }
    return s;
}

static double griewank_rosenbrock(const double *x, int64_t D) {
    double s = 0.0;
    for (int64_t i = 0; i < D; i++) {
        double u = x[i] + 1.0, v = x[(i + 1) % D] + 1.0;
        double w = 100.0 * (u * u - v) * (u * u - v) + (u - 1.0) * (u - 1.0);
        s += w * w / 4000.0 - cos(w) + 1.0;
    }
    return s;
}

static double schaffer_f6(const double *x, int64_t D) {
    double s = 0.0;
    for (int64_t i = 0; i < D; i++) {
        double u = x[i], v = x[(i + 1) % D];
        double r2 = u * u + v * v;
        double sr = sin(sqrt(r2));
        double d = 1.0 + 0.001 * r2;
        s += 0.5 + (sr * sr - 0.5) / (d * d);
    }
    return s;
}

static double base_eval(const PVLand *l, const double *x) {
    switch (l->fid) {
    case F1: return sphere(x, l->dim);
    case F9: return rastrigin(x, l->dim);
    case F12: return schwefel_213(x, l->dim, l->a, l->b, l->alpha);
    case F13: return griewank_rosenbrock(x, l->dim);
    default: return schaffer_f6(x, l->dim);
    }
}

static double land_eval_into(const PVLand *l, const double *x, double *buf) {
    for (int64_t d = 0; d < l->dim; d++) buf[d] = l->flip[d] * (x[d] - l->shift[d]) / l->scale[d];
    return base_eval(l, buf);
}

/* the harness owns its landscape handle, so it may use the shared buffer */
static double land_eval(const PVLand *l, const double *x) { return land_eval_into(l, x, l->buf); }

/* safe to call concurrently on one handle: scratch space is private */
int64_t pv_evaluate_many(const PVLand *l, const double *xs, int64_t count, double *out) {
    double *buf = malloc(l->dim * sizeof(double));
    if (!buf) return -1;
    for (int64_t k = 0; k < count; k++) out[k] = land_eval_into(l, xs + k * l->dim, buf);
    free(buf);
    return 0;
}

/* ------------------------------------------------------------------------ */
/* population harness */

/* harness pushes must always land, so a full stack sheds its oldest item */
static void force_fpush(Mem *m, double x) {
    if (m->n[NF] >= m->fcap) {
        memmove(m->f, m->f + 1, (m->fcap - 1) * sizeof(double));
        m->n[NF] = m->fcap - 1;
    }
    fpush(m, x);
}
static void force_ipush(Mem *m, int64_t x) {
    if (m->n[NI] >= m->icap) {
        memmove(m->i, m->i + 1, (m->icap - 1) * sizeof(int64_t));
        m->n[NI] = m->icap - 1;
    }
    ipush(m, x);
}
static void force_bpush(Mem *m, int x) {
    if (m->n[NB] >= m->bcap) {
        memmove(m->b, m->b + 1, (m->bcap - 1) * sizeof(int8_t));
        m->n[NB] = m->bcap - 1;
    }
    bpush(m, x);
}
static void force_vpush(Mem *m, const double *x) {
    if (m->n[NV] >= m->vcap) {
        memmove(m->v, m->v + m->D, (m->vcap - 1) * m->D * sizeof(double));
        m->n[NV] = m->vcap - 1;
    }
    vpush(m, x);
}

static int in_bounds(const double *x, const PVLand *l) {
    for (int64_t d = 0; d < l->dim; d++)
        if (!(l->lower[d] <= x[d] && x[d] <= l->upper[d])) return 0;
    return 1;
}

/* fresh stacks, the bounds as inputs, and one evaluation of ``point`` */
void pv_init_member(const PVState *s, int64_t p, const PVLand *l, PVSwarm *w,
                    const double *point, int64_t limit) {
    Mem m = member(s, p);
    int64_t D = w->dim;
    int8_t *inkind = s->inkind + p * s->incap;
    double *inf = s->inf + p * s->incap;
    for (int k = 0; k < NSLOTS; k++) m.n[k] = 0;
    m.n[LIMIT] = limit;
    inkind[0] = IN_FLOAT;
    inf[0] = l->lower[0];
    inkind[1] = IN_FLOAT;
    inf[1] = l->upper[0];
    m.n[NIN] = 2;
    double *cur = w->cur + p * D;
    memcpy(cur, point, D * sizeof(double));
    double val = land_eval(l, cur);
    w->value[p] = val;
    w->bestval[p] = val;
    memcpy(w->best + p * D, cur, D * sizeof(double));
    vpush(&m, cur);
    fpush(&m, val);
    bpush(&m, 1);
    if (val < w->pstate[0]) {
        w->pstate[0] = val;
        w->pstate[1] = (double)p;
    }
}

#define MV_EVALUATED 1
#define MV_HAS_POINT 2
#define MV_IMPROVED 4

/* one member's turn within sweep ``move``; returns MV_* flags */
int64_t pv_member_move(const PVState *s, int64_t p, int64_t move, const PVCode *c,
                       const PVLand *l, PVSwarm *w) {
    Mem m = member(s, p);
    int64_t D = w->dim;
    force_ipush(&m, move);
    force_ipush(&m, p);
    force_ipush(&m, (int64_t)w->pstate[1]);
    double previous = w->value[p];
    PVView view = {w->popsize, w->cur, w->best, p};
    w->steps += run_move(&m, c, &view);
    int64_t nv = m.n[NV];
    int64_t flags = 0;
    if (nv > 0) {
        flags |= MV_HAS_POINT;
        memcpy(w->point, vtop(&m, nv - 1), D * sizeof(double));
        memcpy(w->cur + p * D, w->point, D * sizeof(double));
        if (in_bounds(w->point, l)) flags |= MV_EVALUATED;
    }
    if (flags & MV_EVALUATED) {
        double val = land_eval(l, w->point);
        w->value[p] = val;
        if (val < w->bestval[p]) {
            w->bestval[p] = val;
            memcpy(w->best + p * D, w->point, D * sizeof(double));
        }
        int improved = val < previous;
        if (improved) flags |= MV_IMPROVED;
        force_bpush(&m, improved);
        if (!improved) force_vpush(&m, w->best + p * D);
        force_fpush(&m, val);
    } else {
        force_bpush(&m, 0);
        force_fpush(&m, DBL_MAX);
    }
    if (w->bestval[p] < w->pstate[0]) {
        w->pstate[0] = w->bestval[p];
        w->pstate[1] = (double)p;
    }
    return flags;
}

static void record(PVTrace *t, int64_t repeat, int64_t move, int64_t p, double value,
                   int64_t flags, const double *x, int64_t D) {
    int64_t *r = t->rows + t->row * 5;
    r[0] = repeat;
    r[1] = move;
    r[2] = p;
    r[3] = (flags & MV_IMPROVED) ? 1 : 0;
    r[4] = (flags & MV_EVALUATED) ? 1 : 0;
    t->values[t->row] = value;
    double *out = t->points + t->row * D;
    for (int64_t d = 0; d < D; d++) out[d] = x ? x[d] : NAN;
    t->row++;
}

/* a whole repeat: initialisation then ``moves`` sweeps; returns evaluations */
int64_t pv_run_repeat(const PVState *s, const PVCode *c, const PVLand *l, PVSwarm *w,
                      int64_t moves, int64_t limit, const double *init_points, int64_t repeat,
                      PVTrace *trace, double *history) {
    int64_t P = w->popsize, D = w->dim, evals = 0;
    w->pstate[0] = INFINITY;
    w->pstate[1] = 0.0;
    w->steps = 0;
    for (int64_t p = 0; p < P; p++) {
        pv_init_member(s, p, l, w, init_points + p * D, limit);
        evals++;
        if (trace) record(trace, repeat, 0, p, w->value[p], MV_EVALUATED | MV_IMPROVED, w->cur + p * D, D);
    }
    history[0] = w->pstate[0];
    for (int64_t mv = 1; mv <= moves; mv++) {
        for (int64_t p = 0; p < P; p++) {
            int64_t flags = pv_member_move(s, p, mv, c, l, w);
            if (flags & MV_EVALUATED) evals++;
            if (trace)
                record(trace, repeat, mv, p, (flags & MV_EVALUATED) ? w->value[p] : DBL_MAX, flags,
                       (flags & MV_HAS_POINT) ? w->point : NULL, D);
        }
        history[mv] = w->pstate[0];
    }
    return evals;
}

/* ------------------------------------------------------------------------ */
/* the module itself only exists so the build tooling can place the library */

static struct PyModuleDef pvcore_module = {
    PyModuleDef_HEAD_INIT, "_pvcore", "Compiled core, loaded through ctypes.", -1, NULL, NULL, NULL, NULL, NULL,
};

PyMODINIT_FUNC PyInit__pvcore(void) { return PyModule_Create(&pvcore_module); }
