//! One function per subcommand. Each reads its inputs, stages its outputs
//! and fills in the run report; nothing is written until the run succeeds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use solidkit::overlay::{layer_from_json, layer_to_json, result_to_json, Classifier};
use solidkit::topology::model_to_json;
use solidkit::{
    buffer_body, buffer_face, buffer_point, buffer_polyline, build_topology, convex_decompose, convex_hull,
    intersect::{detect_pairs, mesh_mesh_curve},
    io, is_convex, mesh_area, mesh_volume, minkowski_sum_convex, minkowski_sum_general, overlay, region_stats,
    validate_mesh, AabbTree, BodyInput, BooleanKind, BufferParams, ClassRule, ConvexPolytope, IntersectionOutcome,
    Mesh, Point3, Segment3, Tolerance,
};

use crate::exit::{self, Failure};
use crate::input::{self, Entity, Geometry, TolFlags};
use crate::output::{RunReport, Staged};

/// Per-run state shared by the subcommands.
pub struct Ctx {
    pub flags: TolFlags,
    pub report: RunReport,
    pub staged: Staged,
}

impl Ctx {
    pub fn new(command: &str, flags: TolFlags) -> Ctx {
        Ctx {
            flags,
            report: RunReport::new(command),
            staged: Staged::default(),
        }
    }

    fn tolerance<'a>(&mut self, points: impl IntoIterator<Item = &'a Point3>) -> Result<Tolerance, Failure> {
        input::tolerance(self.flags, points, &mut self.report)
    }

    /// Checks a constructed solid and stages it in the format named by `path`.
    fn stage_mesh(&mut self, path: &Path, m: &Mesh, tol: &Tolerance) -> Result<(), Failure> {
        let fmt = input::mesh_format(path)?;
        let v = validate_mesh(m, tol);
        if !v.is_valid() {
            return Err(Failure::new(
                exit::OUTPUT_INVALID,
                "output-invalid",
                format!("constructed mesh for {} failed validation", path.display()),
            )
            .with_detail(json!({ "failures": v.failures() })));
        }
        self.staged.add(path, io::format(m, fmt), mesh_metrics(m, tol));
        Ok(())
    }

    fn stage_json(&mut self, path: &Path, text: String, metrics: BTreeMap<String, Value>) {
        let mut text = text;
        if !text.ends_with('\n') {
            text.push('\n');
        }
        self.staged.add(path, text, metrics);
    }
}

pub fn mesh_metrics(m: &Mesh, tol: &Tolerance) -> BTreeMap<String, Value> {
    let mut out = BTreeMap::new();
    out.insert("vertices".into(), json!(m.vertices().len()));
    out.insert("triangles".into(), json!(m.triangles().len()));
    out.insert("volume".into(), json!(mesh_volume(m).unwrap_or(0.0)));
    out.insert("area".into(), json!(mesh_area(m, tol).area));
    out
}

fn check_mesh_path(path: &Path) -> Result<(), Failure> {
    input::mesh_format(path).map(|_| ())
}

fn read_meshes(ctx: &mut Ctx, paths: &[PathBuf]) -> Result<(Vec<Mesh>, Tolerance), Failure> {
    let raws = paths
        .iter()
        .map(|p| input::read_raw(p, &mut ctx.report))
        .collect::<Result<Vec<_>, _>>()?;
    let tol = ctx.tolerance(raws.iter().flat_map(|r| &r.vertices))?;
    let meshes = raws
        .into_iter()
        .zip(paths)
        .map(|(r, p)| input::ingest(r, &tol, &p.display().to_string(), &mut ctx.report))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((meshes, tol))
}

pub fn hull(ctx: &mut Ctx, input: &Path, output: &Path, facets: Option<&Path>) -> Result<u8, Failure> {
    check_mesh_path(output)?;
    let pts = input::read_points(input, &mut ctx.report)?;
    let tol = ctx.tolerance(&pts)?;
    ctx.report.param("input_points", pts.len());
    let poly = convex_hull(&pts)?;
    let m = poly.to_solid_mesh(&tol)?;
    ctx.report.metric("hull_vertices", poly.vertices().len());
    ctx.report.metric("facets", poly.facets().len());
    ctx.report.metric("volume", poly.volume());
    ctx.stage_mesh(output, &m, &tol)?;
    if let Some(f) = facets {
        ctx.stage_json(f, poly.facets_json(), BTreeMap::new());
    }
    Ok(exit::OK)
}

fn pick_entity(entities: Vec<Entity>, id: Option<&str>) -> Result<Entity, Failure> {
    match id {
        Some(id) => entities.into_iter().find(|e| e.id == id).ok_or_else(|| {
            Failure::new(
                exit::LOOKUP,
                "lookup",
                format!("no entity with id {id:?} in the manifest"),
            )
        }),
        None if entities.len() == 1 => Ok(entities.into_iter().next().expect("one entity")),
        None => Err(Failure::usage(format!(
            "manifest has {} entities; choose one with --entity",
            entities.len()
        ))),
    }
}

pub fn buffer(
    ctx: &mut Ctx,
    input: &Path,
    distance: f64,
    lod: u32,
    entity: Option<&str>,
    output: &Path,
) -> Result<u8, Failure> {
    check_mesh_path(output)?;
    ctx.report.param("distance", distance);
    ctx.report.param("lod", lod);
    let params = BufferParams::new(distance, lod)?;
    let is_json = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let (id, geometry) = if is_json {
        let e = pick_entity(input::read_scene(input, &mut ctx.report)?, entity)?;
        ctx.report.param("entity_attributes", &e.attributes);
        (e.id, e.geometry)
    } else {
        if entity.is_some() {
            return Err(Failure::usage("--entity applies to scene manifests only"));
        }
        (
            input.display().to_string(),
            Geometry::Body(input::read_raw(input, &mut ctx.report)?),
        )
    };
    let tol = ctx.tolerance(geometry.points())?;
    let (kind, m) = match geometry {
        Geometry::Point(p) => ("point", buffer_point(p, &params)?),
        Geometry::Polyline(p) => {
            if p.len() < 2 {
                return Err(solidkit::Error::InvalidInput("polyline needs at least two points".into()).into());
            }
            let segs: Vec<Segment3> = p.windows(2).map(|w| Segment3::new(w[0], w[1])).collect();
            ("polyline", buffer_polyline(&segs, &params)?)
        }
        Geometry::Face(raw) => {
            let face = input::ingest(raw, &tol, &id, &mut ctx.report)?;
            ("face", buffer_face(&face, &params, &tol)?)
        }
        Geometry::Body(raw) => {
            let m = input::ingest(raw, &tol, &id, &mut ctx.report)?;
            // Mesh files with boundary edges are planar faces, not bodies.
            if !m.is_empty() && !validate_mesh(&m, &tol).closed {
                ("face", buffer_face(&m, &params, &tol)?)
            } else {
                ("body", buffer_body(&m, &params, &tol)?)
            }
        }
    };
    ctx.report.param("entity", &id);
    ctx.report.metric("entity_kind", kind);
    ctx.report.metric("sag", params.sag());
    ctx.report.metric("volume", mesh_volume(&m)?);
    ctx.stage_mesh(output, &m, &tol)?;
    Ok(exit::OK)
}

pub fn boolean(ctx: &mut Ctx, op: &str, inputs: &[PathBuf], output: &Path) -> Result<u8, Failure> {
    check_mesh_path(output)?;
    let kind = BooleanKind::parse(op).ok_or_else(|| Failure::usage(format!("unknown boolean operation {op:?}")))?;
    let binary = matches!(kind, BooleanKind::Difference | BooleanKind::SymmetricDifference);
    if binary && inputs.len() != 2 {
        return Err(Failure::usage(format!("{} takes exactly two operands", kind.name())));
    }
    ctx.report.param("op", kind.name());
    let (meshes, tol) = read_meshes(ctx, inputs)?;
    let m = match kind {
        BooleanKind::Union => solidkit::union(&meshes)?,
        BooleanKind::Meet => solidkit::meet(&meshes)?,
        _ => solidkit::boolean(&meshes[0], &meshes[1], kind)?,
    };
    let volumes = meshes.iter().map(mesh_volume).collect::<Result<Vec<_>, _>>()?;
    ctx.report.metric("operand_volumes", volumes);
    ctx.report.metric("volume", mesh_volume(&m)?);
    ctx.stage_mesh(output, &m, &tol)?;
    Ok(exit::OK)
}

pub fn overlay_cmd(
    ctx: &mut Ctx,
    layers: &[PathBuf],
    rule: Option<&Path>,
    output: &Path,
    classes: Option<&Path>,
) -> Result<u8, Failure> {
    let layers = layers
        .iter()
        .map(|p| Ok(layer_from_json(&input::read_text(p, &mut ctx.report)?)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    let rule: Option<ClassRule> = match rule {
        Some(p) => Some(serde_json::from_str(&input::read_text(p, &mut ctx.report)?)?),
        None => None,
    };
    ctx.report
        .param("layers", layers.iter().map(|l| l.name.clone()).collect::<Vec<_>>());
    let res = overlay(&layers)?;
    let by_coverage = |c: &solidkit::Cell| Some(c.coverage(&res));
    let classifier: &dyn Classifier = match &rule {
        Some(r) => r,
        None => &by_coverage,
    };
    let stats = region_stats(&res, |_| true, Some(classifier))?;
    ctx.report.metric("crs", &res.crs);
    ctx.report.metric("cell_count", stats.cell_count);
    ctx.report.metric("total_area", stats.total_area);
    ctx.report.metric("area_by_class", &stats.area_by_class);
    let mut m = BTreeMap::new();
    m.insert("cells".into(), json!(res.cells.len()));
    m.insert("area".into(), json!(stats.total_area));
    ctx.stage_json(output, result_to_json(&res), m);
    if let Some(path) = classes {
        let layer = solidkit::reclassify(&res, classifier)?;
        let mut m = BTreeMap::new();
        m.insert("regions".into(), json!(layer.regions.len()));
        m.insert("area".into(), json!(layer.area()));
        ctx.stage_json(path, layer_to_json(&layer), m);
    }
    Ok(exit::OK)
}

pub fn decompose(ctx: &mut Ctx, input: &Path, max_pieces: Option<usize>, outdir: &Path) -> Result<u8, Failure> {
    let (mut meshes, tol) = read_meshes(ctx, &[input.to_path_buf()])?;
    let m = meshes.pop().expect("one mesh");
    ctx.report.param("max_pieces", max_pieces);
    let d = convex_decompose(&m, max_pieces, &tol)?;
    ctx.staged.dir(outdir);
    let mut pieces = Vec::new();
    for (k, (p, src)) in d.pieces.iter().zip(&d.provenance).enumerate() {
        let name = format!("piece_{k:03}.off");
        ctx.stage_mesh(&outdir.join(&name), p, &tol)?;
        pieces.push(json!({
            "file": name,
            "volume": mesh_volume(p)?,
            "source_facets": src.facets,
        }));
    }
    let manifest = json!({ "genus": d.genus, "pieces": pieces });
    let text = serde_json::to_string_pretty(&manifest)?;
    ctx.stage_json(&outdir.join("manifest.json"), text, BTreeMap::new());
    ctx.report.metric("pieces", d.pieces.len());
    ctx.report.metric("genus", d.genus);
    ctx.report.metric("input_volume", mesh_volume(&m)?);
    ctx.report.metric("total_volume", d.total_volume());
    Ok(exit::OK)
}

/// Parses `0,1;2` into feature body lists.
pub fn parse_features(s: &str) -> Result<Vec<Vec<usize>>, Failure> {
    s.split(';')
        .map(|g| {
            g.split(',')
                .map(|n| {
                    n.trim()
                        .parse::<usize>()
                        .map_err(|_| Failure::usage(format!("bad feature list {s:?}")))
                })
                .collect()
        })
        .collect()
}

pub fn topology(
    ctx: &mut Ctx,
    inputs: &[PathBuf],
    features: Option<&str>,
    merge: bool,
    output: &Path,
) -> Result<u8, Failure> {
    let features = features.map(parse_features).transpose()?.unwrap_or_default();
    ctx.report.param("features", &features);
    ctx.report.param("merge_coplanar", merge);
    let (meshes, tol) = read_meshes(ctx, inputs)?;
    let bodies: Vec<BodyInput> = meshes
        .iter()
        .map(|m| {
            if merge {
                BodyInput::from_mesh_merged(m, &tol)
            } else {
                BodyInput::from_mesh(m)
            }
        })
        .collect();
    let model = build_topology(&bodies, &features, &tol)?;
    let euler = (0..model.bodies.len())
        .map(|b| model.euler_check(b))
        .collect::<solidkit::Result<Vec<_>>>()?;
    ctx.report.metric("census", model.census());
    ctx.report.metric("euler", euler);
    ctx.stage_json(output, model_to_json(&model), BTreeMap::new());
    Ok(exit::OK)
}

pub fn minkowski(ctx: &mut Ctx, a: &Path, b: &Path, output: &Path) -> Result<u8, Failure> {
    check_mesh_path(output)?;
    let (meshes, tol) = read_meshes(ctx, &[a.to_path_buf(), b.to_path_buf()])?;
    let convex = is_convex(&meshes[0], &tol)? && is_convex(&meshes[1], &tol)?;
    let m = if convex && !meshes[0].is_empty() && !meshes[1].is_empty() {
        let pa = ConvexPolytope::from_mesh(&meshes[0])?;
        let pb = ConvexPolytope::from_mesh(&meshes[1])?;
        minkowski_sum_convex(&pa, &pb)?.to_solid_mesh(&tol)?
    } else {
        minkowski_sum_general(&meshes[0], &meshes[1], &tol)?
    };
    ctx.report
        .metric("method", if convex { "convex" } else { "decomposition" });
    ctx.report.metric("volume", mesh_volume(&m)?);
    ctx.stage_mesh(output, &m, &tol)?;
    Ok(exit::OK)
}

fn outcome_json(o: &IntersectionOutcome) -> Value {
    let pts = |p: &[Point3]| p.iter().map(|q| q.to_array()).collect::<Vec<_>>();
    let mut v = json!({ "kind": o.kind().name() });
    match o {
        IntersectionOutcome::Empty => {}
        IntersectionOutcome::Points(p) => v["points"] = json!(pts(p)),
        IntersectionOutcome::Segments(ls) => {
            v["polylines"] = ls
                .iter()
                .map(|l| json!({ "closed": l.closed, "points": pts(&l.points) }))
                .collect::<Vec<_>>()
                .into();
            let lines: Vec<Vec<Point3>> = ls.iter().map(|l| l.points.clone()).collect();
            v["off"] = json!(io::polygons_to_off(&lines));
        }
        IntersectionOutcome::Polygons(ps) => {
            v["polygons"] = ps.iter().map(|p| pts(p)).collect::<Vec<_>>().into();
            v["off"] = json!(io::polygons_to_off(ps));
        }
        IntersectionOutcome::Volume(m) => {
            v["vertices"] = json!(pts(m.vertices()));
            v["triangles"] = json!(m.triangles());
        }
    }
    v
}

pub fn intersect(ctx: &mut Ctx, inputs: &[PathBuf], scene: Option<&Path>, output: &Path) -> Result<u8, Failure> {
    match (scene, inputs.len()) {
        (Some(s), 0) => {
            let entities = input::read_scene(s, &mut ctx.report)?;
            let tol = ctx.tolerance(entities.iter().flat_map(|e| e.geometry.points()))?;
            let mut ids = Vec::new();
            let mut meshes = Vec::new();
            for e in entities {
                let Geometry::Body(raw) = e.geometry else {
                    return Err(solidkit::Error::InvalidInput(format!(
                        "entity {:?}: pair detection needs body entities",
                        e.id
                    ))
                    .into());
                };
                meshes.push(input::ingest(raw, &tol, &e.id, &mut ctx.report)?);
                ids.push(e.id);
            }
            let tree = AabbTree::for_scene(&meshes);
            let pairs = detect_pairs(&meshes, &tree)?;
            let named: Vec<[&str; 2]> = pairs.iter().map(|&(i, j)| [ids[i].as_str(), ids[j].as_str()]).collect();
            ctx.report.metric("entities", meshes.len());
            ctx.report.metric("pairs", pairs.len());
            let mut m = BTreeMap::new();
            m.insert("pairs".into(), json!(pairs.len()));
            ctx.stage_json(output, serde_json::to_string_pretty(&json!({ "pairs": named }))?, m);
        }
        (None, 2) => {
            let (meshes, _) = read_meshes(ctx, inputs)?;
            let o = mesh_mesh_curve(&meshes[0], &meshes[1])?;
            let length: f64 = match &o {
                IntersectionOutcome::Segments(ls) => ls.iter().map(|l| l.length()).sum(),
                _ => 0.0,
            };
            ctx.report.metric("kind", o.kind().name());
            ctx.report.metric("curve_length", length);
            let mut m = BTreeMap::new();
            m.insert("kind".into(), json!(o.kind().name()));
            ctx.stage_json(output, serde_json::to_string_pretty(&outcome_json(&o))?, m);
        }
        _ => return Err(Failure::usage("intersect takes two mesh files or --scene MANIFEST")),
    }
    Ok(exit::OK)
}

pub fn validate(ctx: &mut Ctx, input: &Path) -> Result<u8, Failure> {
    let (mut meshes, tol) = read_meshes(ctx, &[input.to_path_buf()])?;
    let m = meshes.pop().expect("one mesh");
    let v = validate_mesh(&m, &tol);
    ctx.report.metric("valid", v.is_valid());
    ctx.report.metric("failures", v.failures());
    ctx.report.metric("validation", &v);
    if v.is_valid() {
        Ok(exit::OK)
    } else {
        let f = Failure::new(
            exit::INVALID,
            "invalid-mesh",
            format!("{} failed validation", input.display()),
        )
        .with_detail(json!({ "failures": v.failures() }));
        eprintln!("{}", f.diagnostic());
        Ok(exit::INVALID)
    }
}
