use std::collections::HashMap;

use crate::dataset::BinaryDataset;
use crate::error::{Error, Result};
use crate::objective::{ObjectiveKind, Sense};
use crate::rational::{int, ratio, Rational};
use crate::tree::{HyperParams, TreeTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: Rational,
    /// `None` is unbounded above.
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

impl ConstraintSense {
    pub fn symbol(self) -> &'static str {
        match self {
            ConstraintSense::Le => "<=",
            ConstraintSense::Eq => "=",
            ConstraintSense::Ge => ">=",
        }
    }
}

pub type Terms = Vec<(usize, Rational)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Terms,
    pub sense: ConstraintSense,
    pub rhs: Rational,
}

/// `linear + ∑ coef·x·y  sense  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadConstraint {
    pub name: String,
    pub linear: Terms,
    pub quadratic: Vec<(usize, usize, Rational)>,
    pub sense: ConstraintSense,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelObjective {
    pub sense: Sense,
    pub constant: Rational,
    pub terms: Terms,
}

/// Dimensions of the tree and data a model was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub depth: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub n_instances: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
    quadratic: Vec<QuadConstraint>,
    objective: ModelObjective,
    layout: Layout,
}

impl ModelSpec {
    pub(crate) fn from_parts(
        variables: Vec<Variable>,
        constraints: Vec<Constraint>,
        quadratic: Vec<QuadConstraint>,
        objective: ModelObjective,
        layout: Layout,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(variables.len());
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::Data(format!("variable '{}' declared twice", v.name)));
            }
        }
        let n = variables.len();
        let referenced = constraints
            .iter()
            .flat_map(|c| c.terms.iter().map(|t| t.0))
            .chain(quadratic.iter().flat_map(|q| {
                q.linear
                    .iter()
                    .map(|t| t.0)
                    .chain(q.quadratic.iter().flat_map(|t| [t.0, t.1]))
            }))
            .chain(objective.terms.iter().map(|t| t.0));
        for v in referenced {
            if v >= n {
                return Err(Error::Data(format!(
                    "reference to undeclared variable #{v}"
                )));
            }
        }
        Ok(ModelSpec {
            variables,
            index,
            constraints,
            quadratic,
            objective,
            layout,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn quadratic(&self) -> &[QuadConstraint] {
        &self.quadratic
    }

    pub fn objective(&self) -> &ModelObjective {
        &self.objective
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn count_with_prefix(&self, prefix: &str) -> usize {
        self.variables
            .iter()
            .filter(|v| var_family(&v.name) == prefix)
            .count()
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }
}

/// Family of a generated variable name: `a`, `b`, `c`, `d`, `z`, `l`, `N`, `M`,
/// `e` (per-leaf error), `ek` (per-leaf, per-class error) or `F1`.
pub fn var_family(name: &str) -> &str {
    if name == "F1" {
        return "F1";
    }
    let head = name.split('_').next().unwrap_or("");
    if head == "e" && name.matches('_').count() == 2 {
        return "ek";
    }
    head
}

pub fn a_name(t: usize, f: usize) -> String {
    format!("a_{t}_f{}", f + 1)
}

pub fn b_name(t: usize) -> String {
    format!("b_{t}")
}

pub fn d_name(t: usize) -> String {
    format!("d_{t}")
}

pub fn c_name(t: usize, k: usize) -> String {
    format!("c_{t}_{k}")
}

pub fn l_name(t: usize) -> String {
    format!("l_{t}")
}

pub fn z_name(i: usize, t: usize) -> String {
    format!("z_{}_{t}", i + 1)
}

pub fn n_name(t: usize) -> String {
    format!("N_{t}")
}

pub fn m_name(k: usize, t: usize) -> String {
    format!("M_{k}_{t}")
}

pub fn e_name(t: usize) -> String {
    format!("e_{t}")
}

pub fn ek_name(t: usize, k: usize) -> String {
    format!("e_{t}_{k}")
}

pub const F1_NAME: &str = "F1";

struct Builder {
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn var(
        &mut self,
        name: String,
        kind: VarKind,
        lower: Rational,
        upper: Option<Rational>,
    ) -> usize {
        let id = self.variables.len();
        self.index.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        id
    }

    fn binary(&mut self, name: String) -> usize {
        self.var(name, VarKind::Binary, int(0), Some(int(1)))
    }

    fn continuous(&mut self, name: String) -> usize {
        self.var(name, VarKind::Continuous, int(0), None)
    }

    fn id(&self, name: &str) -> usize {
        self.index[name]
    }

    fn add(&mut self, name: String, terms: Terms, sense: ConstraintSense, rhs: Rational) {
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
    }
}

fn one() -> Rational {
    int(1)
}

fn neg(v: i64) -> Rational {
    int(-v)
}

/// Builds the MIP for `obj` over `train` with the given hyperparameters.
pub fn build_model(
    train: &BinaryDataset,
    hp: &HyperParams,
    obj: &ObjectiveKind,
) -> Result<ModelSpec> {
    hp.validate()?;
    obj.validate_for(train)?;
    let n = train.n();
    if n == 0 {
        return Err(Error::Data("empty training set".into()));
    }
    let n_features = train.n_features();
    if hp.f_max > n_features {
        return Err(Error::HyperParams(format!(
            "F_max = {} exceeds the {n_features} available features",
            hp.f_max
        )));
    }
    let n_classes = train.n_classes();
    let topo = TreeTopology::new(hp.depth);
    let f_max = hp.f_max as i64;
    let n_i = n as i64;
    let leftmost = topo.leaves().start;

    let mut bld = Builder {
        variables: Vec::new(),
        index: HashMap::new(),
        constraints: Vec::new(),
    };

    for t in topo.branch_nodes() {
        for f in 0..n_features {
            bld.binary(a_name(t, f));
        }
    }
    for t in topo.branch_nodes() {
        bld.var(b_name(t), VarKind::Integer, int(0), Some(int(f_max - 1)));
    }
    for t in topo.branch_nodes() {
        bld.binary(d_name(t));
    }
    for t in topo.leaves() {
        for k in 0..n_classes {
            bld.binary(c_name(t, k));
        }
    }
    for t in topo.leaves() {
        bld.binary(l_name(t));
    }
    for i in 0..n {
        for t in topo.leaves() {
            bld.binary(z_name(i, t));
        }
    }
    for t in topo.leaves() {
        bld.continuous(n_name(t));
    }
    for k in 0..n_classes {
        for t in topo.leaves() {
            bld.continuous(m_name(k, t));
        }
    }
    let per_class_errors = obj.requires_binary();
    for t in topo.leaves() {
        if per_class_errors {
            for k in 0..n_classes {
                bld.continuous(ek_name(t, k));
            }
        } else {
            bld.continuous(e_name(t));
        }
    }
    if matches!(obj, ObjectiveKind::F1) {
        bld.continuous(F1_NAME.to_string());
    }

    for t in topo.branch_nodes() {
        let d = bld.id(&d_name(t));
        let mut terms: Terms = (0..n_features)
            .map(|f| (bld.id(&a_name(t, f)), one()))
            .collect();
        terms.push((d, neg(f_max)));
        bld.add(
            format!("feat_limit_{t}"),
            terms,
            ConstraintSense::Le,
            int(0),
        );
        let b = bld.id(&b_name(t));
        bld.add(
            format!("thresh_cap_{t}"),
            vec![(b, one()), (d, neg(f_max - 1))],
            ConstraintSense::Le,
            int(0),
        );
        if let Some(p) = topo.parent(t) {
            let dp = bld.id(&d_name(p));
            bld.add(
                format!("nest_{t}"),
                vec![(d, one()), (dp, neg(1))],
                ConstraintSense::Le,
                int(0),
            );
        }
    }

    for t in topo.leaves() {
        let l = bld.id(&l_name(t));
        let mut terms: Terms = (0..n_classes)
            .map(|k| (bld.id(&c_name(t, k)), one()))
            .collect();
        terms.push((l, neg(1)));
        bld.add(format!("one_label_{t}"), terms, ConstraintSense::Eq, int(0));
        let parents: Vec<usize> = topo
            .potential_parents(t)
            .iter()
            .map(|&s| bld.id(&d_name(s)))
            .collect();
        if t != leftmost {
            let mut terms: Terms = vec![(l, one())];
            terms.extend(parents.iter().map(|&d| (d, neg(1))));
            bld.add(format!("leaf_on_{t}"), terms, ConstraintSense::Le, int(0));
        }
        let mut terms: Terms = vec![(l, int(hp.depth as i64))];
        terms.extend(parents.iter().map(|&d| (d, neg(1))));
        bld.add(format!("leaf_off_{t}"), terms, ConstraintSense::Ge, int(0));
    }

    for i in 0..n {
        let terms = topo
            .leaves()
            .map(|t| (bld.id(&z_name(i, t)), one()))
            .collect();
        bld.add(
            format!("assign_{}", i + 1),
            terms,
            ConstraintSense::Eq,
            int(1),
        );
    }
    for i in 0..n {
        for t in topo.leaves() {
            let z = bld.id(&z_name(i, t));
            let l = bld.id(&l_name(t));
            bld.add(
                format!("leaf_use_{}_{t}", i + 1),
                vec![(z, one()), (l, neg(1))],
                ConstraintSense::Le,
                int(0),
            );
        }
    }
    for t in topo.leaves() {
        let mut terms: Terms = (0..n).map(|i| (bld.id(&z_name(i, t)), one())).collect();
        terms.push((bld.id(&l_name(t)), neg(hp.s_min as i64)));
        bld.add(
            format!("min_support_{t}"),
            terms,
            ConstraintSense::Ge,
            int(0),
        );
    }

    for i in 0..n {
        let x = train.row(i);
        for t in topo.leaves() {
            let z = bld.id(&z_name(i, t));
            for s in topo.right_ancestors(t) {
                let mut terms = selected_features(&bld, x, s);
                terms.push((bld.id(&b_name(s)), neg(1)));
                terms.push((bld.id(&d_name(s)), neg(1)));
                terms.push((z, neg(f_max)));
                bld.add(
                    format!("route_right_{}_{t}_{s}", i + 1),
                    terms,
                    ConstraintSense::Ge,
                    neg(f_max),
                );
            }
            for s in topo.left_ancestors(t) {
                let mut terms = selected_features(&bld, x, s);
                terms.push((bld.id(&b_name(s)), neg(1)));
                terms.push((z, int(f_max)));
                bld.add(
                    format!("route_left_{}_{t}_{s}", i + 1),
                    terms,
                    ConstraintSense::Le,
                    int(f_max),
                );
            }
        }
    }

    for k in 0..n_classes {
        for t in topo.leaves() {
            let mut terms: Terms = vec![(bld.id(&m_name(k, t)), one())];
            terms.extend(
                (0..n)
                    .filter(|&i| train.label(i) == k)
                    .map(|i| (bld.id(&z_name(i, t)), neg(1))),
            );
            bld.add(
                format!("class_count_{k}_{t}"),
                terms,
                ConstraintSense::Eq,
                int(0),
            );
        }
    }
    for t in topo.leaves() {
        let mut terms: Terms = vec![(bld.id(&n_name(t)), one())];
        terms.extend((0..n).map(|i| (bld.id(&z_name(i, t)), neg(1))));
        bld.add(
            format!("leaf_count_{t}"),
            terms,
            ConstraintSense::Eq,
            int(0),
        );
    }

    for t in topo.leaves() {
        let big_n = bld.id(&n_name(t));
        if !per_class_errors {
            let e = bld.id(&e_name(t));
            for k in 0..n_classes {
                let m = bld.id(&m_name(k, t));
                let c = bld.id(&c_name(t, k));
                bld.add(
                    format!("err_lo_{t}_{k}"),
                    vec![(e, one()), (big_n, neg(1)), (m, one()), (c, neg(n_i))],
                    ConstraintSense::Ge,
                    neg(n_i),
                );
                bld.add(
                    format!("err_hi_{t}_{k}"),
                    vec![(e, one()), (big_n, neg(1)), (m, one())],
                    ConstraintSense::Le,
                    int(0),
                );
            }
            bld.add(
                format!("err_nonneg_{t}"),
                vec![(e, one())],
                ConstraintSense::Ge,
                int(0),
            );
        } else {
            for k in 0..n_classes {
                let e = bld.id(&ek_name(t, k));
                let m = bld.id(&m_name(k, t));
                let c = bld.id(&c_name(t, k));
                bld.add(
                    format!("err_lo_{t}_{k}"),
                    vec![(e, one()), (big_n, neg(1)), (m, one()), (c, neg(n_i))],
                    ConstraintSense::Ge,
                    neg(n_i),
                );
                bld.add(
                    format!("err_hi_{t}_{k}"),
                    vec![(e, one()), (big_n, neg(1)), (m, one())],
                    ConstraintSense::Le,
                    int(0),
                );
                bld.add(
                    format!("err_on_{t}_{k}"),
                    vec![(e, one()), (c, neg(n_i))],
                    ConstraintSense::Le,
                    int(0),
                );
                bld.add(
                    format!("err_nonneg_{t}_{k}"),
                    vec![(e, one())],
                    ConstraintSense::Ge,
                    int(0),
                );
            }
        }
    }

    let mut quadratic = Vec::new();
    let n_pos = train.class_counts().get(1).copied().unwrap_or(0) as i64;
    let n_neg = train.class_counts()[0] as i64;
    if matches!(obj, ObjectiveKind::F1) {
        let f1 = bld.id(F1_NAME);
        let mut linear: Terms = vec![(f1, int(2 * n_pos))];
        linear.extend(topo.leaves().map(|t| (bld.id(&ek_name(t, 0)), int(2))));
        let mut quad = Vec::new();
        for t in topo.leaves() {
            quad.push((f1, bld.id(&ek_name(t, 1)), one()));
            quad.push((f1, bld.id(&ek_name(t, 0)), neg(1)));
        }
        quadratic.push(QuadConstraint {
            name: "f1_ratio".into(),
            linear,
            quadratic: quad,
            sense: ConstraintSense::Le,
            rhs: int(2 * n_pos),
        });
    }

    let penalty: Terms = if hp.alpha == int(0) {
        Vec::new()
    } else {
        topo.branch_nodes()
            .flat_map(|t| (0..n_features).map(move |f| (t, f)))
            .map(|(t, f)| (bld.id(&a_name(t, f)), hp.alpha.clone()))
            .collect()
    };
    let negated = |terms: Terms| -> Terms { terms.into_iter().map(|(v, c)| (v, -c)).collect() };
    let objective = match obj {
        ObjectiveKind::Accuracy => {
            let mut terms: Terms = topo
                .leaves()
                .map(|t| (bld.id(&e_name(t)), ratio(1, n_i)))
                .collect();
            terms.extend(penalty);
            ModelObjective {
                sense: Sense::Minimize,
                constant: int(0),
                terms,
            }
        }
        ObjectiveKind::CostSensitive { c_fp, c_fn } => {
            let mut terms = Terms::new();
            for t in topo.leaves() {
                terms.push((bld.id(&ek_name(t, 1)), c_fp / int(n_i)));
                terms.push((bld.id(&ek_name(t, 0)), c_fn / int(n_i)));
            }
            terms.extend(penalty);
            ModelObjective {
                sense: Sense::Minimize,
                constant: int(0),
                terms,
            }
        }
        ObjectiveKind::BalancedAccuracy => {
            let mut terms = Terms::new();
            for t in topo.leaves() {
                terms.push((bld.id(&ek_name(t, 0)), ratio(-1, 2 * n_pos)));
                terms.push((bld.id(&ek_name(t, 1)), ratio(-1, 2 * n_neg)));
            }
            terms.extend(negated(penalty));
            ModelObjective {
                sense: Sense::Maximize,
                constant: int(1),
                terms,
            }
        }
        ObjectiveKind::F1 => {
            let mut terms: Terms = vec![(bld.id(F1_NAME), one())];
            terms.extend(negated(penalty));
            ModelObjective {
                sense: Sense::Maximize,
                constant: int(0),
                terms,
            }
        }
    };

    let layout = Layout {
        depth: hp.depth,
        n_features,
        n_classes,
        n_instances: n,
    };
    ModelSpec::from_parts(bld.variables, bld.constraints, quadratic, objective, layout)
}

fn selected_features(bld: &Builder, x: &[u8], s: usize) -> Terms {
    x.iter()
        .enumerate()
        .filter(|(_, &v)| v == 1)
        .map(|(f, _)| (bld.id(&a_name(s, f)), one()))
        .collect()
}
