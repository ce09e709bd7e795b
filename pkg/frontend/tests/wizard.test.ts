import { GridWizard } from "../src/wizard.js";

describe("GridWizard", () => {
  it("walks the grid row-major from the origin", () => {
    const wizard = new GridWizard({
      originX: -3,
      originY: 6,
      spacingX: 3,
      spacingY: 5,
      columns: 3,
    });
    expect(wizard.next()).toEqual([-3, 6]);
    expect(wizard.next()).toEqual([0, 6]);
    expect(wizard.next()).toEqual([3, 6]);
    expect(wizard.next()).toEqual([-3, 11]);
    expect(wizard.next()).toEqual([0, 11]);
    expect(wizard.next()).toEqual([3, 11]);
    expect(wizard.used).toBe(6);
  });

  it("peeks without consuming", () => {
    const wizard = new GridWizard({
      originX: 0,
      originY: 0,
      spacingX: 1,
      spacingY: 2,
      columns: 2,
    });
    expect(wizard.planeAt(3)).toEqual([1, 2]);
    expect(wizard.used).toBe(0);
  });

  it("resets", () => {
    const wizard = new GridWizard({
      originX: 0,
      originY: 0,
      spacingX: 1,
      spacingY: 1,
      columns: 1,
    });
    wizard.next();
    wizard.reset();
    expect(wizard.next()).toEqual([0, 0]);
  });

  it("rejects bad configs", () => {
    expect(
      () => new GridWizard({ originX: 0, originY: 0, spacingX: 1, spacingY: 1, columns: 0 }),
    ).toThrow();
    expect(
      () => new GridWizard({ originX: 0, originY: 0, spacingX: 0, spacingY: 0, columns: 2 }),
    ).toThrow();
  });
});
