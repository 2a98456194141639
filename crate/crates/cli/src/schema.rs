//! JSON formats for the core objects. Parsing points at the offending
//! node with an RFC 6901 pointer; construction failures (a bad ring
//! table, a non-monotone map) come back as validation errors carrying
//! the core library's witness text.
//!
//! Stalk literals decide the kernel: `{"size": n}` is a finite set,
//! `{"elements": [...], "covers": [...]}` a poset, anything else a ring.
//! Map literals are `{"images": [...]}`; sets index their elements, while
//! posets and rings address targets by element name.

use std::collections::BTreeMap;
use std::fmt;

use cylab_core::caps::Caps;
use cylab_core::cdata::{CData, CDataMorphism};
use cylab_core::cylinder::{LaxDatum, LaxDatumMorphism};
use cylab_core::homotopy::FinGroup;
use cylab_core::kernel::{FinPosKernel, FinSetKernel, Kernel, RingKernel, SetMap};
use cylab_core::poset::{MonotoneMap, Poset};
use cylab_core::ring::{
    f4, product_many, quotient, z2_square_zero, zn, FinRing, RingHom,
};
use cylab_core::schematic::{RingedMorphism, RingedPoset};
use serde_json::{json, Map, Value};

/// The document does not have the expected shape at `pointer`.
#[derive(Clone, Debug)]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema error at \"{}\": {}", self.pointer, self.message)
    }
}

/// The document parsed but the object it describes is not lawful.
#[derive(Clone, Debug)]
pub struct ValidationError {
    pub pointer: String,
    pub witness: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "validation error at \"{}\": {}", self.pointer, self.witness)
    }
}

#[derive(Clone, Debug)]
pub enum LoadError {
    Schema(SchemaError),
    Validation(ValidationError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Schema(e) => e.fmt(f),
            LoadError::Validation(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for LoadError {}

fn schema(ptr: &str, message: impl Into<String>) -> LoadError {
    LoadError::Schema(SchemaError { pointer: ptr.to_string(), message: message.into() })
}

fn invalid(ptr: &str, witness: impl fmt::Display) -> LoadError {
    LoadError::Validation(ValidationError {
        pointer: ptr.to_string(),
        witness: witness.to_string(),
    })
}

/// RFC 6901 token escaping: `~` -> `~0`, `/` -> `~1`.
fn join(ptr: &str, key: &str) -> String {
    let token = key.replace('~', "~0").replace('/', "~1");
    format!("{ptr}/{token}")
}

fn as_object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>, LoadError> {
    v.as_object().ok_or_else(|| schema(ptr, "expected an object"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, LoadError> {
    v.as_array().ok_or_else(|| schema(ptr, "expected an array"))
}

fn as_string(v: &Value, ptr: &str) -> Result<String, LoadError> {
    v.as_str().map(str::to_string).ok_or_else(|| schema(ptr, "expected a string"))
}

fn as_usize(v: &Value, ptr: &str) -> Result<usize, LoadError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(ptr, "expected a non-negative integer"))
}

fn get<'a>(m: &'a Map<String, Value>, key: &str, ptr: &str) -> Result<&'a Value, LoadError> {
    m.get(key).ok_or_else(|| schema(ptr, format!("missing field \"{key}\"")))
}

/// Splits a restriction or transition key "x<y" into its two ids.
fn split_pair(key: &str, ptr: &str) -> Result<(String, String), LoadError> {
    match key.split_once('<') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(schema(ptr, "expected a key of the form \"x<y\"")),
    }
}

pub fn poset_from_json(v: &Value, ptr: &str) -> Result<Poset, LoadError> {
    let m = as_object(v, ptr)?;
    let elems_ptr = join(ptr, "elements");
    let elems = as_array(get(m, "elements", ptr)?, &elems_ptr)?;
    let ids: Vec<String> = elems
        .iter()
        .enumerate()
        .map(|(k, e)| as_string(e, &join(&elems_ptr, &k.to_string())))
        .collect::<Result<_, _>>()?;
    let covers_ptr = join(ptr, "covers");
    let mut covers: Vec<(String, String)> = Vec::new();
    if let Some(raw) = m.get("covers") {
        for (k, pair) in as_array(raw, &covers_ptr)?.iter().enumerate() {
            let pair_ptr = join(&covers_ptr, &k.to_string());
            let pair = as_array(pair, &pair_ptr)?;
            if pair.len() != 2 {
                return Err(schema(&pair_ptr, "expected a two-element array"));
            }
            covers.push((
                as_string(&pair[0], &join(&pair_ptr, "0"))?,
                as_string(&pair[1], &join(&pair_ptr, "1"))?,
            ));
        }
    }
    Poset::new(&ids, &covers).map_err(|e| invalid(ptr, e))
}

pub fn poset_to_json(p: &Poset) -> Value {
    let covers: Vec<Value> = p
        .covers()
        .into_iter()
        .map(|(a, b)| json!([p.id(a), p.id(b)]))
        .collect();
    json!({ "elements": p.ids(), "covers": covers })
}

fn preset_ring(name: &str, ptr: &str) -> Result<FinRing, LoadError> {
    if let Some(n) = name.strip_prefix("Z/") {
        let n: usize = n
            .parse()
            .map_err(|_| schema(ptr, format!("bad modulus in preset \"{name}\"")))?;
        if n == 0 {
            return Err(schema(ptr, "the modulus must be at least 1"));
        }
        return Ok(zn(n));
    }
    match name {
        "F4" => Ok(f4()),
        "Z2[x]/(x^2)" => Ok(z2_square_zero()),
        "0" => Ok(cylab_core::ring::zero_ring()),
        _ => Err(schema(ptr, format!("unknown ring preset \"{name}\""))),
    }
}

fn table_from_json(v: &Value, n: usize, ptr: &str) -> Result<Vec<Vec<usize>>, LoadError> {
    let rows = as_array(v, ptr)?;
    if rows.len() != n {
        return Err(schema(ptr, format!("expected {n} rows, found {}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row_ptr = join(ptr, &i.to_string());
            let row = as_array(row, &row_ptr)?;
            if row.len() != n {
                return Err(schema(&row_ptr, format!("expected {n} entries")));
            }
            row.iter()
                .enumerate()
                .map(|(j, x)| {
                    let p = join(&row_ptr, &j.to_string());
                    let x = as_usize(x, &p)?;
                    if x >= n {
                        return Err(schema(&p, format!("entry {x} out of range 0..{n}")));
                    }
                    Ok(x)
                })
                .collect()
        })
        .collect()
}

/// Element of `r` given either by name or by index.
fn ring_element(v: &Value, r: &FinRing, ptr: &str) -> Result<usize, LoadError> {
    if let Some(name) = v.as_str() {
        return r.index_of(name).map_err(|e| invalid(ptr, e));
    }
    let i = as_usize(v, ptr)?;
    if i >= r.order() {
        return Err(schema(ptr, format!("element {i} out of range 0..{}", r.order())));
    }
    Ok(i)
}

pub fn ring_from_json(v: &Value, ptr: &str) -> Result<FinRing, LoadError> {
    let m = as_object(v, ptr)?;
    if let Some(preset) = m.get("preset") {
        let p = join(ptr, "preset");
        return preset_ring(&as_string(preset, &p)?, &p);
    }
    if let Some(factors) = m.get("product") {
        let p = join(ptr, "product");
        let items = as_array(factors, &p)?;
        let rings: Vec<FinRing> = items
            .iter()
            .enumerate()
            .map(|(k, f)| ring_from_json(f, &join(&p, &k.to_string())))
            .collect::<Result<_, _>>()?;
        return Ok(product_many(&rings).0);
    }
    if let Some(q) = m.get("quotient") {
        let p = join(ptr, "quotient");
        let qm = as_object(q, &p)?;
        let base = ring_from_json(get(qm, "ring", &p)?, &join(&p, "ring"))?;
        let ideal_ptr = join(&p, "ideal");
        let ideal: Vec<usize> = as_array(get(qm, "ideal", &p)?, &ideal_ptr)?
            .iter()
            .enumerate()
            .map(|(k, e)| ring_element(e, &base, &join(&ideal_ptr, &k.to_string())))
            .collect::<Result<_, _>>()?;
        return quotient(&base, &ideal).map(|(r, _)| r).map_err(|e| invalid(&p, e));
    }
    let order = as_usize(get(m, "order", ptr)?, &join(ptr, "order"))?;
    let add = table_from_json(get(m, "add", ptr)?, order, &join(ptr, "add"))?;
    let mul = table_from_json(get(m, "mul", ptr)?, order, &join(ptr, "mul"))?;
    let ring = match m.get("names") {
        Some(raw) => {
            let names_ptr = join(ptr, "names");
            let names: Vec<String> = as_array(raw, &names_ptr)?
                .iter()
                .enumerate()
                .map(|(k, e)| as_string(e, &join(&names_ptr, &k.to_string())))
                .collect::<Result<_, _>>()?;
            if names.len() != order {
                return Err(schema(&names_ptr, format!("expected {order} names")));
            }
            FinRing::from_named_tables(names, &add, &mul)
        }
        None => FinRing::from_tables(&add, &mul),
    }
    .map_err(|e| invalid(ptr, e))?;
    for (key, expect) in [("zero", ring.zero()), ("one", ring.one())] {
        if let Some(raw) = m.get(key) {
            let p = join(ptr, key);
            let claimed = ring_element(raw, &ring, &p)?;
            if claimed != expect {
                return Err(invalid(
                    &p,
                    format!("tables put {key} at element {expect}, not {claimed}"),
                ));
            }
        }
    }
    Ok(ring)
}

/// Always explicit tables: presets do not survive a round trip, names do.
/// Construction renumbers so zero and one sit at 0 and 1.
pub fn ring_to_json(r: &FinRing) -> Value {
    let n = r.order();
    let add: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| r.add(i, j)).collect()).collect();
    let mul: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| r.mul(i, j)).collect()).collect();
    json!({
        "order": n,
        "names": r.names(),
        "add": add,
        "mul": mul,
        "zero": r.zero(),
        "one": r.one(),
    })
}

/// Per-kernel stalk and map encodings behind one set of entry points.
pub trait KernelCodec: Kernel {
    /// Name used in diagnostics and kernel sniffing.
    const KIND: &'static str;
    fn stalk_from_json(v: &Value, ptr: &str) -> Result<Self::Obj, LoadError>;
    fn stalk_to_json(o: &Self::Obj) -> Value;
    fn mor_from_json(
        v: &Value,
        src: &Self::Obj,
        dst: &Self::Obj,
        ptr: &str,
    ) -> Result<Self::Mor, LoadError>;
    fn mor_to_json(m: &Self::Mor) -> Value;
}

fn images_field<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, LoadError> {
    let m = as_object(v, ptr)?;
    as_array(get(m, "images", ptr)?, &join(ptr, "images"))
}

impl KernelCodec for FinSetKernel {
    const KIND: &'static str = "finset";

    fn stalk_from_json(v: &Value, ptr: &str) -> Result<usize, LoadError> {
        let m = as_object(v, ptr)?;
        as_usize(get(m, "size", ptr)?, &join(ptr, "size"))
    }

    fn stalk_to_json(o: &usize) -> Value {
        json!({ "size": o })
    }

    fn mor_from_json(v: &Value, src: &usize, dst: &usize, ptr: &str) -> Result<SetMap, LoadError> {
        let imgs = images_field(v, ptr)?;
        let imgs_ptr = join(ptr, "images");
        let map: Vec<usize> = imgs
            .iter()
            .enumerate()
            .map(|(k, e)| as_usize(e, &join(&imgs_ptr, &k.to_string())))
            .collect::<Result<_, _>>()?;
        SetMap::new(*src, *dst, map).map_err(|e| invalid(ptr, e))
    }

    fn mor_to_json(m: &SetMap) -> Value {
        json!({ "images": m.map })
    }
}

impl KernelCodec for FinPosKernel {
    const KIND: &'static str = "finpos";

    fn stalk_from_json(v: &Value, ptr: &str) -> Result<Poset, LoadError> {
        poset_from_json(v, ptr)
    }

    fn stalk_to_json(o: &Poset) -> Value {
        poset_to_json(o)
    }

    fn mor_from_json(
        v: &Value,
        src: &Poset,
        dst: &Poset,
        ptr: &str,
    ) -> Result<MonotoneMap, LoadError> {
        let imgs = images_field(v, ptr)?;
        let imgs_ptr = join(ptr, "images");
        let map: Vec<usize> = imgs
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let p = join(&imgs_ptr, &k.to_string());
                let id = as_string(e, &p)?;
                dst.index(&id).map_err(|err| invalid(&p, err))
            })
            .collect::<Result<_, _>>()?;
        MonotoneMap::new(src.clone(), dst.clone(), map).map_err(|e| invalid(ptr, e))
    }

    fn mor_to_json(m: &MonotoneMap) -> Value {
        let imgs: Vec<&str> = m.map().iter().map(|&j| m.target().id(j)).collect();
        json!({ "images": imgs })
    }
}

impl KernelCodec for RingKernel {
    const KIND: &'static str = "finring";

    fn stalk_from_json(v: &Value, ptr: &str) -> Result<FinRing, LoadError> {
        ring_from_json(v, ptr)
    }

    fn stalk_to_json(o: &FinRing) -> Value {
        ring_to_json(o)
    }

    fn mor_from_json(
        v: &Value,
        src: &FinRing,
        dst: &FinRing,
        ptr: &str,
    ) -> Result<RingHom, LoadError> {
        let imgs = images_field(v, ptr)?;
        let imgs_ptr = join(ptr, "images");
        let map: Vec<usize> = imgs
            .iter()
            .enumerate()
            .map(|(k, e)| ring_element(e, dst, &join(&imgs_ptr, &k.to_string())))
            .collect::<Result<_, _>>()?;
        RingHom::new(src.clone(), dst.clone(), map).map_err(|e| invalid(ptr, e))
    }

    fn mor_to_json(m: &RingHom) -> Value {
        let imgs: Vec<&str> = m.map().iter().map(|&j| m.dst().name(j)).collect();
        json!({ "images": imgs })
    }
}

pub fn cdata_from_json<K: KernelCodec>(v: &Value, ptr: &str) -> Result<CData<K>, LoadError> {
    let m = as_object(v, ptr)?;
    let shape = poset_from_json(get(m, "poset", ptr)?, &join(ptr, "poset"))?;
    let stalks_ptr = join(ptr, "stalks");
    let stalks_raw = as_object(get(m, "stalks", ptr)?, &stalks_ptr)?;
    for key in stalks_raw.keys() {
        if shape.index(key).is_err() {
            return Err(schema(&join(&stalks_ptr, key), "not an element of the poset"));
        }
    }
    let stalks: Vec<K::Obj> = shape
        .ids()
        .iter()
        .map(|id| {
            let p = join(&stalks_ptr, id);
            let raw = stalks_raw
                .get(id)
                .ok_or_else(|| schema(&stalks_ptr, format!("missing stalk for \"{id}\"")))?;
            K::stalk_from_json(raw, &p)
        })
        .collect::<Result<_, _>>()?;
    let res_ptr = join(ptr, "restrictions");
    let mut given: BTreeMap<(usize, usize), K::Mor> = BTreeMap::new();
    if let Some(raw) = m.get("restrictions") {
        for (key, mv) in as_object(raw, &res_ptr)? {
            let p = join(&res_ptr, key);
            let (a, b) = split_pair(key, &p)?;
            let x = shape.index(&a).map_err(|e| invalid(&p, e))?;
            let y = shape.index(&b).map_err(|e| invalid(&p, e))?;
            given.insert((x, y), K::mor_from_json(mv, &stalks[x], &stalks[y], &p)?);
        }
    }
    CData::new(shape, stalks, given).map_err(|e| invalid(ptr, e))
}

/// Restrictions are written on cover pairs only; functoriality restores
/// the rest on load.
pub fn cdata_to_json<K: KernelCodec>(d: &CData<K>) -> Value {
    let shape = d.shape();
    let mut stalks = Map::new();
    for x in 0..d.len() {
        stalks.insert(shape.id(x).to_string(), K::stalk_to_json(d.stalk(x)));
    }
    let mut res = Map::new();
    for (x, y) in shape.covers() {
        res.insert(
            format!("{}<{}", shape.id(x), shape.id(y)),
            K::mor_to_json(d.res(x, y)),
        );
    }
    json!({ "poset": poset_to_json(shape), "stalks": stalks, "restrictions": res })
}

/// Morphism body `{"base": ..., "co": {...}}` against known endpoints.
pub fn cdata_morphism_from_json<K: KernelCodec>(
    v: &Value,
    source: &CData<K>,
    target: &CData<K>,
    ptr: &str,
) -> Result<CDataMorphism<K>, LoadError> {
    let m = as_object(v, ptr)?;
    let base = FinPosKernel::mor_from_json(
        get(m, "base", ptr)?,
        source.shape(),
        target.shape(),
        &join(ptr, "base"),
    )?;
    let co_ptr = join(ptr, "co");
    let co_raw = as_object(get(m, "co", ptr)?, &co_ptr)?;
    for key in co_raw.keys() {
        if source.shape().index(key).is_err() {
            return Err(schema(&join(&co_ptr, key), "not an element of the source poset"));
        }
    }
    let co: Vec<K::Mor> = (0..source.len())
        .map(|x| {
            let id = source.shape().id(x);
            let p = join(&co_ptr, id);
            let raw = co_raw
                .get(id)
                .ok_or_else(|| schema(&co_ptr, format!("missing component for \"{id}\"")))?;
            K::mor_from_json(raw, target.stalk(base.apply(x)), source.stalk(x), &p)
        })
        .collect::<Result<_, _>>()?;
    CDataMorphism::new(source, target, base, co).map_err(|e| invalid(ptr, e))
}

pub fn cdata_morphism_to_json<K: KernelCodec>(f: &CDataMorphism<K>) -> Value {
    let source = f.source();
    let mut co = Map::new();
    for x in 0..source.len() {
        co.insert(source.shape().id(x).to_string(), K::mor_to_json(f.co(x)));
    }
    json!({ "base": FinPosKernel::mor_to_json(f.base()), "co": co })
}

pub fn lax_from_json<K: KernelCodec>(v: &Value, ptr: &str) -> Result<LaxDatum<K>, LoadError> {
    let m = as_object(v, ptr)?;
    let shape = poset_from_json(get(m, "shape", ptr)?, &join(ptr, "shape"))?;
    let fibers_ptr = join(ptr, "fibers");
    let fibers_raw = as_object(get(m, "fibers", ptr)?, &fibers_ptr)?;
    for key in fibers_raw.keys() {
        if shape.index(key).is_err() {
            return Err(schema(&join(&fibers_ptr, key), "not an element of the shape"));
        }
    }
    let fibers: Vec<CData<K>> = shape
        .ids()
        .iter()
        .map(|id| {
            let p = join(&fibers_ptr, id);
            let raw = fibers_raw
                .get(id)
                .ok_or_else(|| schema(&fibers_ptr, format!("missing fiber for \"{id}\"")))?;
            cdata_from_json::<K>(raw, &p)
        })
        .collect::<Result<_, _>>()?;
    let trans_ptr = join(ptr, "transitions");
    let mut given: BTreeMap<(usize, usize), CDataMorphism<K>> = BTreeMap::new();
    if let Some(raw) = m.get("transitions") {
        for (key, tv) in as_object(raw, &trans_ptr)? {
            let p = join(&trans_ptr, key);
            let (a, b) = split_pair(key, &p)?;
            let pi = shape.index(&a).map_err(|e| invalid(&p, e))?;
            let qi = shape.index(&b).map_err(|e| invalid(&p, e))?;
            // The transition over p <= q carries the fiber at q down to p.
            given.insert(
                (pi, qi),
                cdata_morphism_from_json::<K>(tv, &fibers[qi], &fibers[pi], &p)?,
            );
        }
    }
    LaxDatum::new(shape, fibers, given).map_err(|e| invalid(ptr, e))
}

pub fn lax_to_json<K: KernelCodec>(x: &LaxDatum<K>) -> Value {
    let shape = x.index();
    let mut fibers = Map::new();
    for p in 0..shape.len() {
        fibers.insert(shape.id(p).to_string(), cdata_to_json(x.fiber(p)));
    }
    let mut trans = Map::new();
    for (p, q) in shape.covers() {
        trans.insert(
            format!("{}<{}", shape.id(p), shape.id(q)),
            cdata_morphism_to_json(x.transition(p, q)),
        );
    }
    json!({ "shape": poset_to_json(shape), "fibers": fibers, "transitions": trans })
}

/// Which kernel a stalk literal names.
fn sniff_stalk(v: &Value) -> Option<&'static str> {
    let m = v.as_object()?;
    if m.contains_key("size") {
        Some(FinSetKernel::KIND)
    } else if m.contains_key("elements") {
        Some(FinPosKernel::KIND)
    } else {
        Some(RingKernel::KIND)
    }
}

fn sniff_cdata(v: &Value, ptr: &str) -> Result<&'static str, LoadError> {
    let m = as_object(v, ptr)?;
    let stalks = as_object(get(m, "stalks", ptr)?, &join(ptr, "stalks"))?;
    let (key, first) = stalks
        .iter()
        .next()
        .ok_or_else(|| schema(&join(ptr, "stalks"), "cannot infer the kernel without stalks"))?;
    sniff_stalk(first)
        .ok_or_else(|| schema(&join(&join(ptr, "stalks"), key), "stalk literal is not an object"))
}

pub enum AnyCData {
    FinSet(CData<FinSetKernel>),
    FinPos(CData<FinPosKernel>),
    Ring(RingedPoset),
}

pub fn any_cdata_from_json(v: &Value, ptr: &str) -> Result<AnyCData, LoadError> {
    match sniff_cdata(v, ptr)? {
        "finset" => Ok(AnyCData::FinSet(cdata_from_json::<FinSetKernel>(v, ptr)?)),
        "finpos" => Ok(AnyCData::FinPos(cdata_from_json::<FinPosKernel>(v, ptr)?)),
        _ => Ok(AnyCData::Ring(cdata_from_json::<RingKernel>(v, ptr)?)),
    }
}

pub enum AnyLaxDatum {
    FinSet(LaxDatum<FinSetKernel>),
    FinPos(LaxDatum<FinPosKernel>),
    Ring(LaxDatum<RingKernel>),
}

pub fn any_lax_from_json(v: &Value, ptr: &str) -> Result<AnyLaxDatum, LoadError> {
    let m = as_object(v, ptr)?;
    let fibers_ptr = join(ptr, "fibers");
    let fibers = as_object(get(m, "fibers", ptr)?, &fibers_ptr)?;
    let (key, first) = fibers
        .iter()
        .next()
        .ok_or_else(|| schema(&fibers_ptr, "cannot infer the kernel without fibers"))?;
    match sniff_cdata(first, &join(&fibers_ptr, key))? {
        "finset" => Ok(AnyLaxDatum::FinSet(lax_from_json::<FinSetKernel>(v, ptr)?)),
        "finpos" => Ok(AnyLaxDatum::FinPos(lax_from_json::<FinPosKernel>(v, ptr)?)),
        _ => Ok(AnyLaxDatum::Ring(lax_from_json::<RingKernel>(v, ptr)?)),
    }
}

/// `{"source": ..., "target": ..., "base": ..., "co": ...}` as one file.
pub fn ringed_morphism_from_json(v: &Value, ptr: &str) -> Result<RingedMorphism, LoadError> {
    let m = as_object(v, ptr)?;
    let source = cdata_from_json::<RingKernel>(get(m, "source", ptr)?, &join(ptr, "source"))?;
    let target = cdata_from_json::<RingKernel>(get(m, "target", ptr)?, &join(ptr, "target"))?;
    cdata_morphism_from_json::<RingKernel>(v, &source, &target, ptr)
}

pub fn ringed_morphism_to_json(f: &RingedMorphism) -> Value {
    let mut body = cdata_morphism_to_json(f).as_object().cloned().expect("object");
    body.insert("source".into(), cdata_to_json(f.source()));
    body.insert("target".into(), cdata_to_json(f.target()));
    Value::Object(body)
}

/// A cover file is `{"legs": [...]}`; each leg gives its source chart and
/// its morphism body, while the covered space is supplied separately.
pub fn cover_from_json(
    v: &Value,
    space: &RingedPoset,
    ptr: &str,
) -> Result<Vec<RingedMorphism>, LoadError> {
    let m = as_object(v, ptr)?;
    let legs_ptr = join(ptr, "legs");
    as_array(get(m, "legs", ptr)?, &legs_ptr)?
        .iter()
        .enumerate()
        .map(|(k, leg)| {
            let p = join(&legs_ptr, &k.to_string());
            let lm = as_object(leg, &p)?;
            let source =
                cdata_from_json::<RingKernel>(get(lm, "source", &p)?, &join(&p, "source"))?;
            cdata_morphism_from_json::<RingKernel>(leg, &source, space, &p)
        })
        .collect()
}

pub fn cover_to_json(legs: &[RingedMorphism]) -> Value {
    let legs: Vec<Value> = legs
        .iter()
        .map(|leg| {
            let mut body = cdata_morphism_to_json(leg).as_object().cloned().expect("object");
            body.insert("source".into(), cdata_to_json(leg.source()));
            Value::Object(body)
        })
        .collect();
    json!({ "legs": legs })
}

pub fn lax_morphism_from_json<K: KernelCodec>(
    v: &Value,
    ptr: &str,
) -> Result<LaxDatumMorphism<K>, LoadError> {
    let m = as_object(v, ptr)?;
    let source = lax_from_json::<K>(get(m, "source", ptr)?, &join(ptr, "source"))?;
    let target = lax_from_json::<K>(get(m, "target", ptr)?, &join(ptr, "target"))?;
    let shape_map = FinPosKernel::mor_from_json(
        get(m, "shape_map", ptr)?,
        source.index(),
        target.index(),
        &join(ptr, "shape_map"),
    )?;
    let comp_ptr = join(ptr, "components");
    let comp_raw = as_object(get(m, "components", ptr)?, &comp_ptr)?;
    let components: Vec<CDataMorphism<K>> = (0..source.index().len())
        .map(|p| {
            let id = source.index().id(p);
            let raw = comp_raw
                .get(id)
                .ok_or_else(|| schema(&comp_ptr, format!("missing component for \"{id}\"")))?;
            cdata_morphism_from_json::<K>(
                raw,
                source.fiber(p),
                target.fiber(shape_map.apply(p)),
                &join(&comp_ptr, id),
            )
        })
        .collect::<Result<_, _>>()?;
    LaxDatumMorphism::new(&source, &target, shape_map, components).map_err(|e| invalid(ptr, e))
}

pub fn lax_morphism_to_json<K: KernelCodec>(f: &LaxDatumMorphism<K>) -> Value {
    let source = f.source();
    let mut components = Map::new();
    for p in 0..source.index().len() {
        components.insert(
            source.index().id(p).to_string(),
            cdata_morphism_to_json(f.component(p)),
        );
    }
    json!({
        "source": lax_to_json(source),
        "target": lax_to_json(f.target()),
        "shape_map": FinPosKernel::mor_to_json(f.shape_map()),
        "components": components,
    })
}

pub fn group_from_json(v: &Value, ptr: &str) -> Result<FinGroup, LoadError> {
    let m = as_object(v, ptr)?;
    let name = as_string(get(m, "name", ptr)?, &join(ptr, "name"))?;
    let table_ptr = join(ptr, "table");
    let raw = as_array(get(m, "table", ptr)?, &table_ptr)?;
    let n = raw.len();
    let table = table_from_json(get(m, "table", ptr)?, n, &table_ptr)?;
    FinGroup::new(&name, table).map_err(|e| invalid(ptr, e))
}

pub fn group_to_json(g: &FinGroup) -> Value {
    let n = g.order();
    let table: Vec<Vec<usize>> =
        (0..n).map(|a| (0..n).map(|b| g.mul(a, b)).collect()).collect();
    json!({ "name": g.name(), "table": table })
}

pub fn panel_from_json(v: &Value, ptr: &str) -> Result<Vec<FinGroup>, LoadError> {
    as_array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(k, g)| group_from_json(g, &join(ptr, &k.to_string())))
        .collect()
}

/// Caps come as a preset name or as an object overriding chosen fields.
pub fn caps_from_json(v: &Value, ptr: &str) -> Result<Caps, LoadError> {
    if let Some(name) = v.as_str() {
        return match name {
            "default" => Ok(Caps::default()),
            "roomy" => Ok(Caps::roomy()),
            _ => Err(schema(ptr, format!("unknown caps preset \"{name}\""))),
        };
    }
    let m = as_object(v, ptr)?;
    let mut caps = Caps::default();
    for (key, raw) in m {
        let p = join(ptr, key);
        let n = as_usize(raw, &p)?;
        if n == 0 {
            return Err(schema(&p, "caps must be positive"));
        }
        match key.as_str() {
            "ring_order" => caps.ring_order = n,
            "poset_points" => caps.poset_points = n,
            "map_poset_points" => caps.map_poset_points = n,
            "tensor_generators" => caps.tensor_generators = n,
            "hom_budget" => caps.hom_budget = n,
            "group_hom_budget" => caps.group_hom_budget = n,
            _ => return Err(schema(&p, "unknown caps field")),
        }
    }
    Ok(caps)
}

pub fn parse_document(text: &str) -> Result<Value, LoadError> {
    serde_json::from_str(text)
        .map_err(|e| schema("", format!("not valid JSON: {e}")))
}
