//! Standalone HTML reports. Everything is inline: no external URLs.

use std::fmt::Write as _;

use crate::payload::{ReportPayload, PAYLOAD_SCHEMA_MAJOR, PAYLOAD_SCHEMA_MINOR};

pub const PAYLOAD_ELEMENT_ID: &str = "mgsr-payload";

const STYLE: &str = "body{font-family:sans-serif;margin:1.5em;color:#222}\
table{border-collapse:collapse;margin-top:1em}td,th{border:1px solid #ccc;padding:3px 8px;text-align:left}\
th{background:#f3f3f3}.front{fill:#2a2}.other{fill:#36c}circle{cursor:pointer;fill-opacity:.7}\
#popup{position:fixed;display:none;background:#ffc;border:1px solid #aa8;padding:6px 10px;max-width:40em}\
code{font-size:90%}";

/// Minimal viewer logic: clicking a point shows the model equation.
const VIEWER: &str = r#"(function(){
var el=document.getElementById('mgsr-payload');if(!el)return;
var p=JSON.parse(el.textContent);
if(!p.schema||p.schema.major>1){document.body.insertAdjacentHTML('afterbegin','<p>Unsupported report schema.</p>');return;}
var byId={};p.models.forEach(function(m){byId[m.id]=m;});
var pop=document.getElementById('popup');
document.querySelectorAll('circle[data-model]').forEach(function(c){
c.addEventListener('click',function(ev){var m=byId[c.getAttribute('data-model')];
pop.textContent='Model '+m.id+': '+m.equation;pop.style.left=(ev.clientX+12)+'px';pop.style.top=(ev.clientY+12)+'px';pop.style.display='block';ev.stopPropagation();});});
document.addEventListener('click',function(){pop.style.display='none';});
})();"#;

pub fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Makes JSON safe inside a `<script>` element. `<` only occurs inside
/// JSON strings, where `\u003c` is an equivalent escape.
pub fn escape_script(json: &str) -> String {
    json.replace('<', "\\u003c")
}

fn scatter(p: &ReportPayload) -> String {
    let (w, h, pad) = (640.0, 360.0, 40.0);
    let pts: Vec<(usize, f64, f64, bool)> = p
        .models
        .iter()
        .filter_map(|m| m.scores.get(&p.split).map(|s| (m.id, m.complexity as f64, s.r2, m.pareto)))
        .filter(|(_, _, r2, _)| r2.is_finite())
        .collect();
    let max_c = pts.iter().map(|q| q.1).fold(1.0, f64::max);
    let min_r = pts.iter().map(|q| 1.0 - q.2).fold(f64::INFINITY, f64::min).min(0.0);
    let max_r = pts.iter().map(|q| 1.0 - q.2).fold(1e-12, f64::max);
    let mut svg = format!(
        "<svg id=\"scatter\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" role=\"img\">\
<line x1=\"{pad}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#888\"/>\
<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{0}\" stroke=\"#888\"/>\
<text x=\"{2}\" y=\"{3}\" text-anchor=\"middle\">complexity</text>\
<text x=\"12\" y=\"{4}\" transform=\"rotate(-90 12 {4})\" text-anchor=\"middle\">1 - R²</text>",
        h - pad,
        w - pad / 2.0,
        w / 2.0,
        h - 8.0,
        h / 2.0
    );
    // Front points last so they draw on top.
    let mut ordered = pts.clone();
    ordered.sort_by_key(|q| q.3);
    for (id, c, r2, front) in ordered {
        let x = pad + (c / max_c) * (w - 1.5 * pad);
        let y = pad + ((1.0 - r2 - min_r) / (max_r - min_r)) * (h - 2.0 * pad);
        let _ = write!(
            svg,
            "<circle data-model=\"{id}\" class=\"{}\" cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"4\"><title>model {id}</title></circle>",
            if front { "front" } else { "other" }
        );
    }
    svg.push_str("</svg>");
    svg
}

pub fn render_report(payload: &ReportPayload, ui_bundle: Option<&str>) -> String {
    let mut rows = String::new();
    let mut front: Vec<_> = payload.models.iter().filter(|m| m.pareto).collect();
    front.sort_by(|a, b| a.complexity.cmp(&b.complexity).then(a.id.cmp(&b.id)));
    for m in front {
        let r2 = m.scores.get(&payload.split).map_or(f64::NAN, |s| s.r2);
        let _ = write!(
            rows,
            "<tr><td>{}</td><td>{r2:.4}</td><td>{}</td><td><code>{}</code></td></tr>",
            m.id,
            m.complexity,
            escape_html(&m.equation)
        );
    }
    let script = match ui_bundle {
        Some(js) => js.replace("</script", "<\\/script"),
        None => VIEWER.to_string(),
    };
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>mgsr report</title>\n\
<style>{STYLE}</style>\n</head>\n<body>\n<h1>Symbolic regression report</h1>\n\
<p>{n} models, {g} unique genes; scores on the {split} split. Green points are Pareto-optimal.</p>\n\
{svg}\n<div id=\"popup\"></div>\n<h2>Pareto front</h2>\n\
<table><thead><tr><th>model</th><th>R²</th><th>complexity</th><th>equation</th></tr></thead>\n<tbody>{rows}</tbody></table>\n\
<script type=\"application/json\" id=\"{PAYLOAD_ELEMENT_ID}\" data-schema=\"{PAYLOAD_SCHEMA_MAJOR}.{PAYLOAD_SCHEMA_MINOR}\">{json}</script>\n\
<script>{script}</script>\n</body>\n</html>\n",
        n = payload.models.len(),
        g = payload.genes.len(),
        split = payload.split,
        svg = scatter(payload),
        json = escape_script(&payload.to_json()),
    )
}

/// Extracts the embedded payload JSON from a rendered report.
pub fn extract_payload(html: &str) -> Option<String> {
    let marker = format!("id=\"{PAYLOAD_ELEMENT_ID}\"");
    let start = html.find(&marker)?;
    let open_end = start + html[start..].find('>')? + 1;
    let close = open_end + html[open_end..].find("</script>")?;
    Some(html[open_end..close].to_string())
}
