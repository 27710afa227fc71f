use kexshard::rng::DeterministicRng;
use kexshard::schemes::{FragmentationPolicy, SchemeId, Suite};
use kexshard::storage::{collect, disperse, DirectorySite, MemorySite, StorageSite};
use kexshard::error::Error;

fn sites(root: &std::path::Path, n: usize) -> Vec<DirectorySite> {
    (1..=n)
        .map(|k| DirectorySite::new(root.join(format!("site{k}"))).unwrap())
        .collect()
}

#[test]
fn disperse_then_collect_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let suite = Suite::production();
    let mut rng = DeterministicRng::new(11);
    let key = suite.spec().random_key(&mut rng);
    let data: Vec<u8> = (0..5000u32).map(|x| (x * 7) as u8).collect();
    for scheme in SchemeId::ALL {
        let d = suite
            .share(scheme, Some(&key), &data, 4, FragmentationPolicy::Interleaved, &mut rng)
            .unwrap();
        let owned = sites(dir.path(), 4);
        let refs: Vec<&dyn StorageSite> = owned.iter().map(|s| s as &dyn StorageSite).collect();
        let object = format!("obj-{scheme}");
        let names = disperse(&d.shares, &refs, &object).unwrap();
        assert_eq!(names[2], format!("{object}.3.kxsh"));
        assert!(dir.path().join("site3").join(&names[2]).is_file());

        let back = collect(&refs, &object).unwrap();
        assert_eq!(back, d.shares);
        assert_eq!(suite.reconstruct(Some(&key), &back).unwrap(), data);
    }
}

#[test]
fn missing_site_object_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let suite = Suite::production();
    let mut rng = DeterministicRng::new(12);
    let key = suite.spec().random_key(&mut rng);
    let d = suite
        .share(SchemeId::Ssake, Some(&key), b"payload", 3, FragmentationPolicy::Contiguous, &mut rng)
        .unwrap();
    let owned = sites(dir.path(), 3);
    let refs: Vec<&dyn StorageSite> = owned.iter().map(|s| s as &dyn StorageSite).collect();
    disperse(&d.shares, &refs, "doc").unwrap();
    owned[1].delete("doc.2.kxsh").unwrap();
    assert_eq!(
        collect(&refs, "doc").unwrap_err(),
        Error::IncompleteSet { missing: vec![2] }
    );
}

#[test]
fn concurrent_puts_on_distinct_names() {
    let site = MemorySite::new();
    std::thread::scope(|s| {
        for t in 0..8u8 {
            let site = &site;
            s.spawn(move || {
                for k in 0..50u8 {
                    site.put(&format!("o{t}-{k}"), &[t, k]).unwrap();
                }
            });
        }
    });
    assert_eq!(site.list().unwrap().len(), 400);
    assert_eq!(site.get("o3-7").unwrap(), Some(vec![3, 7]));
}
